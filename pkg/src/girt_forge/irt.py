"""Canonical data model for Markdown issue report templates.

A template is a ``---``-delimited frontmatter table (name, about, title,
labels, assignees) followed by a Markdown body whose structure is a flat
list of sections, each introduced by a headline. Parsing, rendering, and
validation round-trip: ``parse(render(parse(s)))`` is structurally equal
to ``parse(s)`` for any input that parses at all.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import DataError

KNOWN_KEYS = ("name", "about", "title", "labels", "assignees")

HEADING = "heading"
BOLD = "bold"
PLAIN = "plain"


class IrtParseError(DataError):
    """Template text could not be parsed; carries the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class MissingFrontmatter(IrtParseError):
    pass


class MalformedFrontmatter(IrtParseError):
    pass


@dataclass(frozen=True)
class HeadlineStyle:
    """How a section headline is written: an ATX heading of some level,
    a bold-only line, or an unmarked line."""

    kind: str
    level: int = 0

    def __post_init__(self):
        if self.kind not in (HEADING, BOLD, PLAIN):
            raise ValueError(f"unknown headline kind {self.kind!r}")
        if self.kind == HEADING and not 1 <= self.level <= 6:
            raise ValueError(f"heading level must be in 1..6, got {self.level}")
        if self.kind != HEADING and self.level != 0:
            raise ValueError("level is only meaningful for headings")

    @classmethod
    def heading(cls, level: int) -> "HeadlineStyle":
        return cls(HEADING, level)

    @classmethod
    def bold(cls) -> "HeadlineStyle":
        return cls(BOLD)

    @classmethod
    def plain(cls) -> "HeadlineStyle":
        return cls(PLAIN)


@dataclass(frozen=True)
class Section:
    headline: str
    style: HeadlineStyle
    content: str = ""


def _freeze(value):
    return tuple(value) if isinstance(value, list) else value


@dataclass(frozen=True)
class IrtMetadata:
    """The five-field frontmatter table.

    ``extras`` holds frontmatter keys outside the known five, verbatim,
    so that rendering is lossless.
    """

    name: str = ""
    about: str = ""
    title: str = ""
    labels: tuple[str, ...] = ()
    assignees: tuple[str, ...] = ()
    extras: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "labels", _freeze(self.labels))
        object.__setattr__(self, "assignees", _freeze(self.assignees))
        object.__setattr__(
            self, "extras", tuple((k, v) for k, v in self.extras)
        )


@dataclass(frozen=True)
class IrtBody:
    sections: tuple[Section, ...] = ()
    preamble: str = ""

    def __post_init__(self):
        object.__setattr__(self, "sections", _freeze(self.sections))

    def is_empty(self) -> bool:
        return not self.sections and not self.preamble

    def headlines(self) -> list[str]:
        return [s.headline for s in self.sections]


@dataclass(frozen=True)
class IssueReportTemplate:
    metadata: IrtMetadata
    body: IrtBody


@dataclass(frozen=True)
class Violation:
    code: str
    field: str
    message: str


_KEY_VALUE_RE = re.compile(r"^([A-Za-z0-9_-]+)\s*:(.*)$")
_ATX_RE = re.compile(r"^(#{1,6})[ \t]+(\S.*?)\s*$")
_FENCE_RE = re.compile(r"^\s*(```|~~~)")


def _unquote(value: str) -> str:
    value = value.strip()
    if len(value) >= 2 and value[0] == value[-1] and value[0] in ("'", '"'):
        return value[1:-1]
    return value


def _parse_list(value: str) -> tuple[str, ...]:
    value = value.strip()
    if value.startswith("[") and value.endswith("]"):
        value = value[1:-1]
    else:
        value = _unquote(value)
    items = [_unquote(part) for part in value.split(",")]
    return tuple(item for item in items if item)


def _match_headline(line: str) -> tuple[str, HeadlineStyle] | None:
    m = _ATX_RE.match(line)
    if m:
        return m.group(2), HeadlineStyle.heading(len(m.group(1)))
    stripped = line.strip()
    if (
        stripped.startswith("**")
        and stripped.endswith("**")
        and len(stripped) > 4
    ):
        inner = stripped[2:-2].strip()
        if inner and "**" not in inner and not inner.startswith("*") and not inner.endswith("*"):
            return inner, HeadlineStyle.bold()
    return None


def _trim_blank_edges(lines: list[str]) -> list[str]:
    start, end = 0, len(lines)
    while start < end and not lines[start].strip():
        start += 1
    while end > start and not lines[end - 1].strip():
        end -= 1
    return lines[start:end]


def parse_irt(source: str) -> IssueReportTemplate:
    """Parse template text into its structured form.

    Raises MissingFrontmatter when the leading ``---`` block is absent or
    unterminated, MalformedFrontmatter on a frontmatter line that is not
    ``key: value``. Both carry the 1-based line number.
    """
    lines = source.split("\n")

    open_idx = 0
    while open_idx < len(lines) and not lines[open_idx].strip():
        open_idx += 1
    if open_idx >= len(lines) or lines[open_idx].strip() != "---":
        raise MissingFrontmatter("expected opening '---' delimiter", open_idx + 1)

    close_idx = None
    for i in range(open_idx + 1, len(lines)):
        if lines[i].strip() == "---":
            close_idx = i
            break
    if close_idx is None:
        raise MissingFrontmatter("frontmatter block never closed", len(lines))

    fields: dict[str, str] = {}
    extras: list[tuple[str, str]] = []
    for i in range(open_idx + 1, close_idx):
        line = lines[i]
        if not line.strip():
            continue
        m = _KEY_VALUE_RE.match(line)
        if not m:
            raise MalformedFrontmatter(f"not a 'key: value' line: {line!r}", i + 1)
        key, raw_value = m.group(1), m.group(2).strip()
        if key in KNOWN_KEYS:
            fields[key] = raw_value
        else:
            extras.append((key, raw_value))

    metadata = IrtMetadata(
        name=_unquote(fields.get("name", "")),
        about=_unquote(fields.get("about", "")),
        title=_unquote(fields.get("title", "")),
        labels=_parse_list(fields.get("labels", "")),
        assignees=_parse_list(fields.get("assignees", "")),
        extras=tuple(extras),
    )
    body = _parse_body(lines[close_idx + 1 :])
    return IssueReportTemplate(metadata=metadata, body=body)


def _parse_body(lines: list[str]) -> IrtBody:
    preamble_lines: list[str] = []
    sections: list[tuple[str, HeadlineStyle, list[str]]] = []
    in_fence = False
    for line in lines:
        if _FENCE_RE.match(line):
            in_fence = not in_fence
        headline = None if in_fence else _match_headline(line)
        if headline is not None:
            sections.append((headline[0], headline[1], []))
        elif sections:
            sections[-1][2].append(line)
        else:
            preamble_lines.append(line)
    return IrtBody(
        sections=tuple(
            Section(h, style, "\n".join(_trim_blank_edges(content)))
            for h, style, content in sections
        ),
        preamble="\n".join(_trim_blank_edges(preamble_lines)),
    )


def _render_scalar(value: str) -> str:
    return value if value else "''"


def _render_title(value: str) -> str:
    return f"'{value}'" if value else "''"


def _render_item_list(items: tuple[str, ...]) -> str:
    return ", ".join(items) if items else "''"


def render_headline(headline: str, style: HeadlineStyle) -> str:
    if style.kind == HEADING:
        return "#" * style.level + " " + headline
    if style.kind == BOLD:
        return f"**{headline}**"
    return headline


def render_frontmatter(metadata: IrtMetadata) -> str:
    lines = [
        "---",
        f"name: {_render_scalar(metadata.name)}",
        f"about: {_render_scalar(metadata.about)}",
        f"title: {_render_title(metadata.title)}",
        f"labels: {_render_item_list(metadata.labels)}",
        f"assignees: {_render_item_list(metadata.assignees)}",
    ]
    lines.extend(f"{key}: {value}" for key, value in metadata.extras)
    lines.append("---")
    return "\n".join(lines) + "\n"


def render_body(body: IrtBody) -> str:
    blocks = []
    if body.preamble:
        blocks.append(body.preamble)
    for section in body.sections:
        head = render_headline(section.headline, section.style)
        blocks.append(head + "\n" + section.content if section.content else head)
    return "\n\n".join(blocks) + "\n" if blocks else ""


def render_irt(irt: IssueReportTemplate) -> str:
    """Emit the canonical text form: fixed frontmatter key order, title and
    empty fields single-quoted, comma-joined lists, LF endings, trailing
    newline. Deterministic byte-for-byte."""
    text = render_frontmatter(irt.metadata)
    body = render_body(irt.body)
    if body:
        text += "\n" + body
    return text


def validate_irt(irt: IssueReportTemplate) -> list[Violation]:
    """Return the rule violations; an empty list means the template is valid."""
    violations = []
    if not irt.metadata.name:
        violations.append(Violation("MissingName", "name", "name must be non-empty"))
    if not irt.metadata.about:
        violations.append(Violation("MissingAbout", "about", "about must be non-empty"))
    if irt.body.is_empty():
        violations.append(Violation("EmptyBody", "body", "body must have a section or preamble"))
    return violations


def dominant_style(body: IrtBody) -> HeadlineStyle:
    """The style used by the majority of a body's headlines.

    Ties break toward headings; among heading levels the most common wins,
    lower level first. Bodies without sections default to a level-2 heading.
    """
    if not body.sections:
        return HeadlineStyle.heading(2)
    kind_counts: dict[str, int] = {}
    level_counts: dict[int, int] = {}
    for section in body.sections:
        kind_counts[section.style.kind] = kind_counts.get(section.style.kind, 0) + 1
        if section.style.kind == HEADING:
            level_counts[section.style.level] = level_counts.get(section.style.level, 0) + 1
    heading_count = kind_counts.get(HEADING, 0)
    best_other = max(
        (count, kind) for kind, count in
        list(kind_counts.items()) + [(BOLD, 0)]
        if kind != HEADING
    )
    if heading_count >= best_other[0]:
        level = max(level_counts.items(), key=lambda kv: (kv[1], -kv[0]))[0] if level_counts else 2
        return HeadlineStyle.heading(level)
    return HeadlineStyle(best_other[1])
