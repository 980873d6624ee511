"""Template generation backends and the evaluation harness.

Two backends sit behind one interface: a deterministic retrieval-assembly
generator (nearest corpus template under TF-IDF cosine fills the masked
fields) and a client for a remote seq2seq model service. Either can be
scored against a test split with the shared metrics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol

import requests

from .analysis import TfidfModel, fit_tfidf, transform
from .errors import BackendUnavailable, DataError, InvalidBackendOutput
from .instruct import (
    FIELD_ORDER,
    VARIANT_LABELS,
    VARIANTS,
    FieldValue,
    Instruction,
    InstructPair,
    build_instruction,
    parse_instruction,
    render_field_value,
    serialize_instruction,
    style_kind_from_label,
)
from .irt import (
    HEADING,
    HeadlineStyle,
    IrtBody,
    IrtMetadata,
    IrtParseError,
    IssueReportTemplate,
    Section,
    Violation,
    dominant_style,
    parse_irt,
    render_irt,
    validate_irt,
)
from .metrics import score_pair, tokenize

PLACEHOLDER_CONTENT = "A clear and concise description."


@dataclass(frozen=True)
class DecodingConfig:
    max_length: int = 512
    min_length: int = 0
    top_p: float = 0.95
    top_k: int = 50

    def __post_init__(self):
        if self.max_length <= 0:
            raise ValueError("max_length must be positive")
        if self.min_length < 0 or self.min_length > self.max_length:
            raise ValueError("min_length must be in 0..max_length")
        if not 0 < self.top_p <= 1:
            raise ValueError("top_p must be in (0, 1]")
        if self.top_k <= 0:
            raise ValueError("top_k must be positive")


class GeneratorBackend(Protocol):
    def generate(self, instruction: Instruction, config: DecodingConfig) -> str: ...


class EmptyIndex(DataError):
    pass


@dataclass(frozen=True)
class IndexEntry:
    irt_id: str
    irt: IssueReportTemplate
    instruction: Instruction
    vector: object


def concrete_instruction_text(ins: Instruction) -> str:
    """The retrieval view of an instruction: concrete fields and the
    summary only; masked and empty fields carry no signal."""
    parts = [
        f"{name}: {render_field_value(name, ins.field(name))}"
        for name in FIELD_ORDER
        if ins.field(name).is_concrete
    ]
    if ins.summary:
        parts.append(f"summary: {ins.summary}")
    return "\n".join(parts)


@dataclass
class RetrievalIndex:
    entries: list[IndexEntry]
    model: TfidfModel

    @classmethod
    def build(cls, items: list[tuple[str, IssueReportTemplate]]) -> "RetrievalIndex":
        if not items:
            raise EmptyIndex("cannot build an index from zero templates")
        instructions = [build_instruction(irt) for _, irt in items]
        texts = [concrete_instruction_text(ins) for ins in instructions]
        model = fit_tfidf(texts)
        entries = [
            IndexEntry(irt_id, irt, ins, transform(model, text))
            for (irt_id, irt), ins, text in zip(items, instructions, texts)
        ]
        return cls(entries=entries, model=model)


def _nearest(index: RetrievalIndex, ins: Instruction, top_k: int) -> IndexEntry:
    query = transform(index.model, concrete_instruction_text(ins))
    scored = sorted(
        index.entries,
        key=lambda entry: (-float(entry.vector @ query), entry.irt_id),
    )
    return scored[: max(top_k, 1)][0]


def _resolve_style(headlines_type: FieldValue, retrieved: IssueReportTemplate) -> HeadlineStyle:
    fallback = dominant_style(retrieved.body)
    if not headlines_type.is_concrete:
        return fallback
    kind = style_kind_from_label(headlines_type.value)
    if kind is None:
        return fallback
    if kind == HEADING:
        return fallback if fallback.kind == HEADING else HeadlineStyle.heading(2)
    return HeadlineStyle(kind)


def _pick_scalar(fv: FieldValue, retrieved_value: str, keep_empty: bool = True) -> str:
    if fv.is_concrete:
        return fv.value
    if fv.state == "empty" and keep_empty:
        return ""
    return retrieved_value


def _pick_list(fv: FieldValue, retrieved_value: tuple[str, ...]) -> tuple[str, ...]:
    if fv.is_concrete:
        return fv.value
    if fv.state == "empty":
        return ()
    return retrieved_value


def _assemble_body(ins: Instruction, retrieved: IssueReportTemplate) -> IrtBody:
    if ins.headlines.state == "masked":
        return retrieved.body
    if ins.headlines.state == "empty":
        return IrtBody(preamble=retrieved.body.preamble or PLACEHOLDER_CONTENT)
    style = _resolve_style(ins.headlines_type, retrieved)
    by_name = {}
    for section in retrieved.body.sections:
        by_name.setdefault(section.headline, section)
    # Same-named retrieved sections are reused whole (content and written
    # form), so a query built from a corpus member reproduces that member
    # exactly; only unmatched headlines fall back to the query style.
    sections = tuple(
        by_name[headline]
        if headline in by_name
        else Section(headline, style, PLACEHOLDER_CONTENT)
        for headline in ins.headlines.value
    )
    return IrtBody(sections=sections, preamble=retrieved.body.preamble)


def _truncate(irt: IssueReportTemplate, max_length: int) -> IssueReportTemplate:
    while len(tokenize(render_irt(irt))) > max_length and len(irt.body.sections) > 1:
        irt = IssueReportTemplate(
            irt.metadata, IrtBody(irt.body.sections[:-1], irt.body.preamble)
        )
    return irt


def retrieve_generate(
    index: RetrievalIndex, instruction: Instruction, config: DecodingConfig
) -> str:
    """Deterministic generation by nearest-neighbour assembly.

    Concrete fields are copied verbatim, <|EMPTY|> fields stay empty, and
    <|MASK|> fields are filled from the closest corpus template (cosine over
    TF-IDF of the concrete instruction text, candidate pool limited to
    top_k, ties to the lowest id). Bodies longer than max_length tokens are
    truncated section by section from the end; top_p and min_length have no
    effect on this backend.
    """
    if not index.entries:
        raise EmptyIndex("retrieval index is empty")
    entry = _nearest(index, instruction, config.top_k)
    retrieved = entry.irt

    # A template must keep name and about to validate, so <|EMPTY|> falls
    # back to the retrieved value for those two fields only.
    metadata = IrtMetadata(
        name=_pick_scalar(instruction.name, retrieved.metadata.name, keep_empty=False),
        about=_pick_scalar(instruction.about, retrieved.metadata.about, keep_empty=False),
        title=_pick_scalar(instruction.title, retrieved.metadata.title),
        labels=_pick_list(instruction.labels, retrieved.metadata.labels),
        assignees=_pick_list(instruction.assignees, retrieved.metadata.assignees),
        extras=retrieved.metadata.extras,
    )
    body = _assemble_body(instruction, retrieved)
    result = _truncate(IssueReportTemplate(metadata, body), config.max_length)
    return render_irt(result)


class RetrievalBackend:
    def __init__(self, index: RetrievalIndex):
        self.index = index

    def generate(self, instruction: Instruction, config: DecodingConfig) -> str:
        return retrieve_generate(self.index, instruction, config)


@dataclass
class GenerationResult:
    text: str
    warnings: list[Violation] = field(default_factory=list)


def remote_generate(
    endpoint: str,
    instruction: Instruction,
    config: DecodingConfig,
    timeout: float = 60.0,
) -> GenerationResult:
    """POST the serialized instruction to a model service and validate the
    answer. Validation problems come back as warnings, not errors; text
    that does not even parse as a template is an InvalidBackendOutput."""
    payload = {
        "instruction": serialize_instruction(instruction),
        "config": {
            "max_length": config.max_length,
            "min_length": config.min_length,
            "top_p": config.top_p,
            "top_k": config.top_k,
        },
    }
    try:
        response = requests.post(endpoint, json=payload, timeout=timeout)
        response.raise_for_status()
        body = response.json()
    except (requests.RequestException, ValueError) as exc:
        raise BackendUnavailable(f"backend at {endpoint}: {exc}") from exc
    if not isinstance(body, dict) or not isinstance(body.get("output"), str):
        raise InvalidBackendOutput(f"backend at {endpoint} returned no 'output' field")
    output = body["output"]
    try:
        irt = parse_irt(output)
    except IrtParseError as exc:
        raise InvalidBackendOutput(f"backend output is not a template: {exc}", output) from exc
    return GenerationResult(text=output, warnings=validate_irt(irt))


class RemoteBackend:
    def __init__(self, endpoint: str, timeout: float = 60.0):
        self.endpoint = endpoint
        self.timeout = timeout
        self.last_warnings: list[Violation] = []

    def generate(self, instruction: Instruction, config: DecodingConfig) -> str:
        result = remote_generate(self.endpoint, instruction, config, self.timeout)
        self.last_warnings = result.warnings
        return result.text


@dataclass
class VariantReport:
    rouge1: float
    rougeL: float
    bleu: float
    meteor: float
    n: int
    failures: int


def evaluate(
    backend: GeneratorBackend,
    pairs: list[InstructPair],
    config: DecodingConfig | None = None,
) -> dict[str, VariantReport]:
    """Mean metric scores per variant, scaled to [0, 100].

    Backend errors are recorded as failures and score zero; the report
    always lists the four variants in fixed order.
    """
    offenders = [pair.id for pair in pairs if pair.split != "test"]
    if offenders:
        raise DataError(f"evaluate expects test-split pairs; got {offenders[:3]}")
    config = config or DecodingConfig()
    report: dict[str, VariantReport] = {}
    for variant in VARIANTS:
        subset = [pair for pair in pairs if pair.variant == variant]
        totals = [0.0, 0.0, 0.0, 0.0]
        failures = 0
        for pair in subset:
            try:
                output = backend.generate(parse_instruction(pair.instruction_text), config)
            except (BackendUnavailable, InvalidBackendOutput, DataError):
                failures += 1
                continue
            score = score_pair(output, pair.output_text)
            totals[0] += score.rouge1_f1
            totals[1] += score.rougeL_f1
            totals[2] += score.bleu
            totals[3] += score.meteor
        n = len(subset)
        means = [100.0 * total / n if n else 0.0 for total in totals]
        report[VARIANT_LABELS[variant]] = VariantReport(
            rouge1=means[0], rougeL=means[1], bleu=means[2], meteor=means[3],
            n=n, failures=failures,
        )
    return report
