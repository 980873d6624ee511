"""Instruction records and the four-variant dataset expansion.

An instruction is the serialized key/value block a generator consumes:
the five metadata fields plus headlines_type and headlines, each either a
concrete value, ``<|EMPTY|>`` (must stay empty), or ``<|MASK|>`` (generator
decides), followed by an optional free-text summary line.
"""

from __future__ import annotations

import ast
import random
from dataclasses import dataclass, replace
from typing import Protocol

import requests

from .errors import BackendUnavailable, DataError
from .irt import (
    BOLD,
    HEADING,
    PLAIN,
    HeadlineStyle,
    IssueReportTemplate,
    dominant_style,
    parse_irt,
    render_irt,
)
from .seeds import derive_seed

MASK_TOKEN = "<|MASK|>"
EMPTY_TOKEN = "<|EMPTY|>"

FIELD_ORDER = ("name", "about", "title", "labels", "assignees", "headlines_type", "headlines")
LIST_FIELDS = ("labels", "assignees")

VARIANTS = ("meta", "meta_mask", "meta_sum", "meta_sum_mask")
VARIANT_LABELS = {
    "meta": "META",
    "meta_mask": "META+MASK",
    "meta_sum": "META+SUM",
    "meta_sum_mask": "META+SUM+MASK",
}
SPLITS = ("train", "validation", "test")

HEADING_TYPE_LABEL = "# Heading"
BOLD_TYPE_LABEL = "**Bold**"
PLAIN_TYPE_LABEL = "Plain"

SUMMARY_PROMPT = (
    "You are Zephyr, an AI assistant. Be polite and provide only truthful "
    "information. Summarize this GitHub issue template only using the "
    "provided text."
)


class InstructionParseError(DataError):
    pass


class UnknownKey(InstructionParseError):
    pass


class MissingRequiredKey(InstructionParseError):
    pass


@dataclass(frozen=True)
class FieldValue:
    """One instruction field: concrete value, explicitly empty, or masked."""

    state: str
    value: str | tuple[str, ...] | None = None

    def __post_init__(self):
        if self.state not in ("concrete", "empty", "masked"):
            raise ValueError(f"unknown field state {self.state!r}")
        if self.state == "concrete":
            if isinstance(self.value, list):
                object.__setattr__(self, "value", tuple(self.value))
            if self.value is None or self.value == "" or self.value == ():
                raise ValueError("concrete fields must carry a non-empty value")
        elif self.value is not None:
            raise ValueError(f"{self.state} fields carry no value")

    @classmethod
    def concrete(cls, value) -> "FieldValue":
        return cls("concrete", value)

    @classmethod
    def empty(cls) -> "FieldValue":
        return cls("empty")

    @classmethod
    def masked(cls) -> "FieldValue":
        return cls("masked")

    @property
    def is_concrete(self) -> bool:
        return self.state == "concrete"


@dataclass(frozen=True)
class Instruction:
    name: FieldValue
    about: FieldValue
    title: FieldValue
    labels: FieldValue
    assignees: FieldValue
    headlines_type: FieldValue
    headlines: FieldValue
    summary: str | None = None

    def field(self, name: str) -> FieldValue:
        return getattr(self, name)


@dataclass(frozen=True)
class InstructPair:
    id: str
    irt_id: str
    variant: str
    instruction_text: str
    output_text: str
    split: str = ""


def style_label(style: HeadlineStyle) -> str:
    if style.kind == HEADING:
        return HEADING_TYPE_LABEL
    if style.kind == BOLD:
        return BOLD_TYPE_LABEL
    return PLAIN_TYPE_LABEL


def style_kind_from_label(label: str) -> str | None:
    return {
        HEADING_TYPE_LABEL: HEADING,
        BOLD_TYPE_LABEL: BOLD,
        PLAIN_TYPE_LABEL: PLAIN,
    }.get(label.strip())


def build_instruction(irt: IssueReportTemplate, summary: str | None = None) -> Instruction:
    """Derive the instruction that describes a template: empty metadata
    fields map to <|EMPTY|>, body section titles become the headlines."""

    def scalar(value: str) -> FieldValue:
        return FieldValue.concrete(value) if value else FieldValue.empty()

    def listing(values: tuple[str, ...]) -> FieldValue:
        return FieldValue.concrete(values) if values else FieldValue.empty()

    meta = irt.metadata
    headlines = tuple(irt.body.headlines())
    return Instruction(
        name=scalar(meta.name),
        about=scalar(meta.about),
        title=scalar(meta.title),
        labels=listing(meta.labels),
        assignees=listing(meta.assignees),
        headlines_type=(
            FieldValue.concrete(style_label(dominant_style(irt.body)))
            if headlines
            else FieldValue.empty()
        ),
        headlines=listing(headlines),
        summary=summary,
    )


def _quote_item(item: str) -> str:
    escaped = item.replace("\\", "\\\\").replace("'", "\\'")
    escaped = "".join(
        ch if ch >= " " else f"\\x{ord(ch):02x}" for ch in escaped
    )
    return f"'{escaped}'"


def render_field_value(field_name: str, fv: FieldValue) -> str:
    if fv.state == "empty":
        return EMPTY_TOKEN
    if fv.state == "masked":
        return MASK_TOKEN
    if field_name == "headlines":
        return "[" + ", ".join(_quote_item(item) for item in fv.value) + "]"
    if field_name in LIST_FIELDS:
        return ", ".join(fv.value)
    return fv.value


def serialize_instruction(ins: Instruction) -> str:
    lines = [f"{name}: {render_field_value(name, ins.field(name))}" for name in FIELD_ORDER]
    if ins.summary is not None:
        lines.append(f"summary: {ins.summary}")
    return "\n".join(lines)


def _parse_field_value(field_name: str, raw: str) -> FieldValue:
    raw = raw.strip()
    if raw == MASK_TOKEN:
        return FieldValue.masked()
    if raw in (EMPTY_TOKEN, ""):
        return FieldValue.empty()
    if field_name == "headlines":
        try:
            items = ast.literal_eval(raw)
        except (ValueError, SyntaxError) as exc:
            raise InstructionParseError(f"headlines is not a list literal: {raw!r}") from exc
        if not isinstance(items, (list, tuple)) or not all(isinstance(i, str) for i in items):
            raise InstructionParseError("headlines must be a list of strings")
        return FieldValue.concrete(tuple(items)) if items else FieldValue.empty()
    if field_name in LIST_FIELDS:
        items = tuple(part.strip() for part in raw.split(",") if part.strip())
        return FieldValue.concrete(items) if items else FieldValue.empty()
    return FieldValue.concrete(raw)


def parse_instruction(text: str) -> Instruction:
    """Inverse of serialize_instruction. The summary line, when present,
    swallows all remaining lines (summaries may contain newlines)."""
    fields: dict[str, FieldValue] = {}
    summary: str | None = None
    lines = text.split("\n")
    i = 0
    while i < len(lines):
        line = lines[i]
        if not line.strip():
            i += 1
            continue
        key, sep, value = line.partition(":")
        key = key.strip()
        if not sep:
            raise UnknownKey(f"not a 'key: value' line: {line!r}")
        if key == "summary":
            summary = "\n".join([value.removeprefix(" ")] + lines[i + 1 :])
            break
        if key not in FIELD_ORDER:
            raise UnknownKey(f"unknown instruction key {key!r}")
        fields[key] = _parse_field_value(key, value)
        i += 1
    missing = [name for name in FIELD_ORDER if name not in fields]
    if missing:
        raise MissingRequiredKey(f"missing instruction keys: {', '.join(missing)}")
    return Instruction(summary=summary, **fields)


def maskable_fields(ins: Instruction) -> list[str]:
    return [name for name in FIELD_ORDER if ins.field(name).is_concrete]


def mask_instruction(ins: Instruction, rng_seed: int) -> Instruction:
    """Mask two concrete fields chosen uniformly at random (all of them when
    fewer than two are concrete). The summary is never maskable."""
    if any(ins.field(name).state == "masked" for name in FIELD_ORDER):
        raise ValueError("instruction already has masked fields")
    candidates = maskable_fields(ins)
    count = min(2, len(candidates))
    chosen = random.Random(rng_seed).sample(candidates, count)
    return replace(ins, **{name: FieldValue.masked() for name in chosen})


class Summarizer(Protocol):
    def summarize(self, irt_text: str) -> str: ...


class StubSummarizer:
    """Deterministic offline summary: template name plus its section list."""

    kind = "stub"

    def summarize(self, irt_text: str) -> str:
        irt = parse_irt(irt_text)
        sections = ", ".join(irt.body.headlines())
        return f"This issue template is for '{irt.metadata.name}'. Sections: {sections}."


class RemoteSummarizer:
    """Asks a remote language-model endpoint for the summary."""

    kind = "remote"

    def __init__(self, endpoint: str, timeout: float = 30.0):
        self.endpoint = endpoint
        self.timeout = timeout

    def summarize(self, irt_text: str) -> str:
        try:
            response = requests.post(
                self.endpoint,
                json={"prompt": SUMMARY_PROMPT, "text": irt_text},
                timeout=self.timeout,
            )
            response.raise_for_status()
            payload = response.json()
        except (requests.RequestException, ValueError) as exc:
            raise BackendUnavailable(f"summarizer at {self.endpoint}: {exc}") from exc
        if not isinstance(payload, dict) or not isinstance(payload.get("summary"), str):
            raise BackendUnavailable(
                f"summarizer at {self.endpoint} returned no 'summary' field"
            )
        return payload["summary"]


def summarize(irt_text: str, backend: Summarizer) -> str:
    return backend.summarize(irt_text)


def expand_variants(
    irt: IssueReportTemplate, summary: str, seed: int, irt_id: str
) -> list[InstructPair]:
    """One template becomes four pairs: +-summary x +-mask. The two masked
    variants draw independently from seeds derived per (seed, id, variant)."""
    output_text = render_irt(irt)
    plain = build_instruction(irt)
    with_summary = build_instruction(irt, summary)
    instructions = {
        "meta": plain,
        "meta_mask": mask_instruction(plain, derive_seed(seed, irt_id, "meta_mask")),
        "meta_sum": with_summary,
        "meta_sum_mask": mask_instruction(
            with_summary, derive_seed(seed, irt_id, "meta_sum_mask")
        ),
    }
    return [
        InstructPair(
            id=f"{irt_id}/{variant}",
            irt_id=irt_id,
            variant=variant,
            instruction_text=serialize_instruction(instructions[variant]),
            output_text=output_text,
        )
        for variant in VARIANTS
    ]


def split_dataset(
    pairs: list[InstructPair],
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1),
    seed: int = 0,
) -> list[InstructPair]:
    """Assign train/validation/test by template id, so all four variants of
    a template land in the same split."""
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"split ratios must sum to 1, got {ratios}")
    ids = sorted({pair.irt_id for pair in pairs})
    random.Random(seed).shuffle(ids)
    n = len(ids)
    cut1 = round(n * ratios[0])
    cut2 = round(n * (ratios[0] + ratios[1]))
    assignment = {}
    for bucket, split in ((ids[:cut1], "train"), (ids[cut1:cut2], "validation"), (ids[cut2:], "test")):
        for irt_id in bucket:
            assignment[irt_id] = split
    return [replace(pair, split=assignment[pair.irt_id]) for pair in pairs]


def pair_to_row(pair: InstructPair) -> dict:
    return {
        "id": pair.id,
        "irt_id": pair.irt_id,
        "variant": pair.variant,
        "instruction": pair.instruction_text,
        "output": pair.output_text,
        "split": pair.split,
    }


def pair_from_row(row: dict) -> InstructPair:
    return InstructPair(
        id=row["id"],
        irt_id=row["irt_id"],
        variant=row["variant"],
        instruction_text=row["instruction"],
        output_text=row["output"],
        split=row.get("split", ""),
    )
