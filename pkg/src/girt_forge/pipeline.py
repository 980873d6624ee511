"""Corpus ingestion and the five preprocessing stages.

Stage order is fixed: filter_null -> anonymize -> normalize -> dedup ->
script_filter. Every stage reports conserved counts (input = output +
dropped) and the whole pipeline is deterministic for a given corpus.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path

from .errors import DataError
from .irt import (
    IrtParseError,
    IssueReportTemplate,
    parse_irt,
    render_body,
    render_frontmatter,
    render_irt,
)

STAGES = ("ingest", "filter_null", "anonymize", "normalize", "dedup", "script_filter")

URL_TAG = "<|URL|>"
EMAIL_TAG = "<|Email|>"
IMAGE_TAG = "<|Image|>"
REPO_TAG = "<|Repo_Name|>"

DEFAULT_LATIN_THRESHOLD = 0.5


class UnreadableInput(DataError):
    pass


class MalformedJsonLine(DataError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class CorpusRecord:
    id: str
    repo_name: str = ""
    file_path: str = ""
    raw: str = ""
    repo_meta: dict[str, str] = field(default_factory=dict)
    parsed: IssueReportTemplate | None = None
    diagnostic: str | None = None


@dataclass(frozen=True)
class PipelineStats:
    stage: str
    input_count: int
    output_count: int
    dropped: int

    def __post_init__(self):
        if self.stage not in STAGES:
            raise ValueError(f"unknown stage {self.stage!r}")
        if self.dropped < 0 or self.input_count != self.output_count + self.dropped:
            raise ValueError(
                f"stage counts must conserve: {self.input_count} != "
                f"{self.output_count} + {self.dropped}"
            )


def _record_from_row(row: dict, line: int) -> CorpusRecord:
    if not isinstance(row, dict):
        raise MalformedJsonLine("row is not a JSON object", line)
    if "id" not in row or "content" not in row:
        raise MalformedJsonLine("row is missing 'id' or 'content'", line)
    meta = row.get("meta") or {}
    if not isinstance(meta, dict):
        raise MalformedJsonLine("'meta' is not an object", line)
    record = CorpusRecord(
        id=str(row["id"]),
        repo_name=str(row.get("repo", "")),
        file_path=str(row.get("path", "")),
        raw=str(row["content"]),
        repo_meta={str(k): str(v) for k, v in meta.items()},
    )
    return _attach_parse(record)


def _attach_parse(record: CorpusRecord) -> CorpusRecord:
    try:
        record.parsed = parse_irt(record.raw)
    except IrtParseError as exc:
        record.parsed = None
        record.diagnostic = str(exc)
    return record


def ingest(source) -> list[CorpusRecord]:
    """Read a corpus from a JSONL file/stream or a directory of .md files.

    Records whose content fails to parse are kept, with ``parsed`` unset and
    a diagnostic, so that filter_null can account for them.
    """
    if hasattr(source, "read"):
        return _ingest_lines(source)
    path = Path(source)
    if path.is_dir():
        records = []
        for md in sorted(path.rglob("*.md")):
            rel = md.relative_to(path).as_posix()
            try:
                raw = md.read_text(encoding="utf-8")
            except OSError as exc:
                raise UnreadableInput(f"cannot read {md}: {exc}") from exc
            records.append(
                _attach_parse(CorpusRecord(id=rel, file_path=str(md), raw=raw))
            )
        return records
    if not path.is_file():
        raise UnreadableInput(f"no such file or directory: {path}")
    try:
        with path.open(encoding="utf-8") as handle:
            return _ingest_lines(handle)
    except OSError as exc:
        raise UnreadableInput(f"cannot read {path}: {exc}") from exc


def _ingest_lines(stream) -> list[CorpusRecord]:
    records = []
    for line_no, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedJsonLine(f"invalid JSON: {exc.msg}", line_no) from exc
        records.append(_record_from_row(row, line_no))
    return records


def filter_null(records: list[CorpusRecord]) -> tuple[list[CorpusRecord], PipelineStats]:
    """Drop unparseable records and those missing name, about, or a body."""
    kept = []
    for record in records:
        irt = record.parsed
        if irt is None or not irt.metadata.name or not irt.metadata.about or irt.body.is_empty():
            continue
        kept.append(record)
    stats = PipelineStats("filter_null", len(records), len(kept), len(records) - len(kept))
    return kept, stats


_TAG_RE = re.compile(r"(<\|[A-Za-z_]+\|>)")
_IMAGE_RE = re.compile(r"!\[[^\]]*\]\([^)]*\)")
_URL_RE = re.compile(r"(?:https?://|www\.)[^\s\)\]\}>]+")
_EMAIL_RE = re.compile(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}")


def _repo_pattern(repo_name: str) -> re.Pattern | None:
    if not repo_name:
        return None
    # hyphens count as name characters: acme/widget must not hit acme/widget-pro
    return re.compile(
        rf"(?<![\w/-]){re.escape(repo_name)}(?![\w/-])", re.IGNORECASE
    )


def anonymize_text(text: str, repo_name: str = "") -> str:
    """Replace images, URLs, emails, and the repository name with tags.

    Existing ``<|...|>`` tags are left untouched, which makes the
    substitution idempotent.
    """
    repo_re = _repo_pattern(repo_name)
    pieces = []
    for piece in _TAG_RE.split(text):
        if _TAG_RE.fullmatch(piece):
            pieces.append(piece)
            continue
        piece = _IMAGE_RE.sub(IMAGE_TAG, piece)
        piece = _URL_RE.sub(URL_TAG, piece)
        piece = _EMAIL_RE.sub(EMAIL_TAG, piece)
        if repo_re is not None:
            piece = repo_re.sub(REPO_TAG, piece)
        pieces.append(piece)
    return "".join(pieces)


def find_sensitive(text: str, repo_name: str = "") -> list[str]:
    """The detector view used to verify anonymization completeness."""
    repo_re = _repo_pattern(repo_name)
    found = []
    for piece in _TAG_RE.split(text):
        if _TAG_RE.fullmatch(piece):
            continue
        found.extend(_IMAGE_RE.findall(piece))
        found.extend(_URL_RE.findall(piece))
        found.extend(_EMAIL_RE.findall(piece))
        if repo_re is not None:
            found.extend(repo_re.findall(piece))
    return found


def _user_tokens(count: int) -> tuple[str, ...]:
    return tuple(f"USER_{i}" for i in range(1, count + 1))


def anonymize(record: CorpusRecord) -> CorpusRecord:
    """Anonymize one record's metadata and body; assignees become USER_i."""
    irt = record.parsed
    if irt is None:
        raise DataError(f"record {record.id} has no parsed template")
    repo = record.repo_name

    def scrub(text: str) -> str:
        return anonymize_text(text, repo)

    meta = irt.metadata
    new_meta = replace(
        meta,
        name=scrub(meta.name),
        about=scrub(meta.about),
        title=scrub(meta.title),
        labels=tuple(scrub(label) for label in meta.labels),
        assignees=_user_tokens(len(meta.assignees)),
        extras=tuple((k, scrub(v)) for k, v in meta.extras),
    )
    new_body = replace(
        irt.body,
        preamble=scrub(irt.body.preamble),
        sections=tuple(
            replace(s, headline=scrub(s.headline), content=scrub(s.content))
            for s in irt.body.sections
        ),
    )
    out = replace(record, parsed=IssueReportTemplate(new_meta, new_body))
    return out


def _meta_list(raw: str) -> tuple[str, ...]:
    return tuple(item.strip() for item in raw.split(",") if item.strip())


def normalize(record: CorpusRecord) -> CorpusRecord:
    """Complete empty frontmatter fields from repository metadata.

    Frontmatter wins when both carry a value. Values pulled in from the
    repository metadata are anonymized on the way in, so this stage cannot
    reintroduce sensitive text after the anonymize stage has run.
    """
    irt = record.parsed
    if irt is None:
        raise DataError(f"record {record.id} has no parsed template")
    meta = irt.metadata
    repo_meta = record.repo_meta
    repo = record.repo_name

    def fill_scalar(current: str, key: str) -> str:
        if current or key not in repo_meta:
            return current
        return anonymize_text(repo_meta[key].strip(), repo)

    updates = {
        "name": fill_scalar(meta.name, "name"),
        "about": fill_scalar(meta.about, "about"),
        "title": fill_scalar(meta.title, "title"),
    }
    if not meta.labels and repo_meta.get("labels"):
        updates["labels"] = tuple(
            anonymize_text(label, repo) for label in _meta_list(repo_meta["labels"])
        )
    if not meta.assignees and repo_meta.get("assignees"):
        updates["assignees"] = _user_tokens(len(_meta_list(repo_meta["assignees"])))
    new_meta = replace(meta, **updates)
    return replace(record, parsed=IssueReportTemplate(new_meta, irt.body))


def dedup_key(irt: IssueReportTemplate) -> tuple[str, str]:
    return render_frontmatter(irt.metadata), render_body(irt.body)


def deduplicate(records: list[CorpusRecord]) -> tuple[list[CorpusRecord], PipelineStats]:
    """Exact deduplication on (canonical metadata, canonical body); the first
    occurrence in input order survives."""
    seen = set()
    kept = []
    for record in records:
        key = dedup_key(record.parsed) if record.parsed else ("", record.raw)
        if key in seen:
            continue
        seen.add(key)
        kept.append(record)
    stats = PipelineStats("dedup", len(records), len(kept), len(records) - len(kept))
    return kept, stats


@lru_cache(maxsize=4096)
def _is_latin_letter(ch: str) -> bool:
    return unicodedata.name(ch, "").startswith("LATIN")


def latin_fraction(text: str) -> float:
    """Fraction of letters (digits, punctuation, whitespace excluded) whose
    Unicode script is Latin; 1.0 when there are no letters at all."""
    letters = latin = 0
    for ch in text:
        if ch.isalpha():
            letters += 1
            if _is_latin_letter(ch):
                latin += 1
    return latin / letters if letters else 1.0


def script_filter(
    records: list[CorpusRecord], latin_threshold: float = DEFAULT_LATIN_THRESHOLD
) -> tuple[list[CorpusRecord], PipelineStats]:
    """Keep records whose dominant-script ratio meets the Latin threshold."""
    if not 0 < latin_threshold <= 1:
        raise ValueError(f"latin_threshold must be in (0, 1], got {latin_threshold}")
    kept = []
    for record in records:
        text = render_irt(record.parsed) if record.parsed else record.raw
        if latin_fraction(text) >= latin_threshold:
            kept.append(record)
    stats = PipelineStats("script_filter", len(records), len(kept), len(records) - len(kept))
    return kept, stats


def run_pipeline(
    records: list[CorpusRecord], latin_threshold: float = DEFAULT_LATIN_THRESHOLD
) -> tuple[list[CorpusRecord], list[PipelineStats]]:
    """Apply all five stages in order, collecting per-stage statistics."""
    all_stats = [PipelineStats("ingest", len(records), len(records), 0)]

    records, stats = filter_null(records)
    all_stats.append(stats)

    records = [anonymize(r) for r in records]
    all_stats.append(PipelineStats("anonymize", len(records), len(records), 0))

    records = [normalize(r) for r in records]
    all_stats.append(PipelineStats("normalize", len(records), len(records), 0))

    records, stats = deduplicate(records)
    all_stats.append(stats)

    records, stats = script_filter(records, latin_threshold)
    all_stats.append(stats)

    return records, all_stats


def record_to_row(record: CorpusRecord, with_canonical: bool = True) -> dict:
    row = {
        "id": record.id,
        "repo": record.repo_name,
        "path": record.file_path,
        "content": record.raw,
        "meta": dict(record.repo_meta),
    }
    if record.diagnostic is not None:
        row["diagnostic"] = record.diagnostic
    if with_canonical and record.parsed is not None:
        row["canonical"] = render_irt(record.parsed)
    return row


def write_corpus_jsonl(records: list[CorpusRecord], stream, with_canonical: bool = True) -> None:
    for record in records:
        stream.write(json.dumps(record_to_row(record, with_canonical), ensure_ascii=False))
        stream.write("\n")


def stats_to_json(stats: list[PipelineStats]) -> list[dict]:
    return [
        {
            "stage": s.stage,
            "input": s.input_count,
            "output": s.output_count,
            "dropped": s.dropped,
        }
        for s in stats
    ]
