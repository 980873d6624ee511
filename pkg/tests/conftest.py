from __future__ import annotations

import json
import random
from pathlib import Path

import pytest

from girt_forge.irt import IrtParseError, parse_irt
from girt_forge.pipeline import CorpusRecord, ingest

FIXTURES = Path(__file__).parent / "fixtures"
TEMPLATES_DIR = FIXTURES / "templates"
CANONICAL_BUG_PATH = TEMPLATES_DIR / "01_bug_report.md"


@pytest.fixture(scope="session")
def canonical_bug_text() -> str:
    return CANONICAL_BUG_PATH.read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def template_corpus() -> list[CorpusRecord]:
    records = ingest(TEMPLATES_DIR)
    assert len(records) >= 50
    return records


@pytest.fixture(scope="session")
def metric_oracle_rows() -> list[dict]:
    rows = []
    with (FIXTURES / "metric_oracle.jsonl").open(encoding="utf-8") as handle:
        for line in handle:
            rows.append(json.loads(line))
    return rows


_SECTION_POOL = [
    ("Describe the bug", "A clear and concise description of what the bug is."),
    ("To Reproduce", "Steps to reproduce the behavior."),
    ("Expected behavior", "What you expected to happen."),
    ("Environment", "- OS: [e.g. Ubuntu]\n- Version [e.g. 22]"),
    ("Additional context", "Add any other context about the problem here."),
    ("Proposed solution", "Describe the change you would like to see."),
    ("Alternatives", "Other approaches you considered."),
    ("Logs", "Paste relevant log lines."),
]


def make_template_text(
    name: str,
    about: str = "Report something",
    title: str = "",
    labels: str = "bug",
    assignees: str = "''",
    sections: list[tuple[str, str]] | None = None,
    body_suffix: str = "",
) -> str:
    lines = [
        "---",
        f"name: {name}",
        f"about: {about}",
        f"title: '{title}'",
        f"labels: {labels}",
        f"assignees: {assignees}",
        "---",
        "",
    ]
    for headline, content in sections or _SECTION_POOL[:3]:
        lines.append(f"## {headline}")
        lines.append(content + body_suffix)
        lines.append("")
    return "\n".join(lines)


def build_synthetic_corpus(n: int = 200, seed: int = 13) -> list[CorpusRecord]:
    """A deterministic corpus with planted nulls, duplicates, CJK bodies,
    and emails/URLs/images, for exercising every pipeline stage."""
    rng = random.Random(seed)
    records = []

    def add(record_id: str, text: str, repo: str = "", meta: dict | None = None):
        records.append(
            CorpusRecord(id=record_id, repo_name=repo, raw=text, repo_meta=meta or {})
        )

    kinds = ["Bug report", "Feature request", "Question", "Docs issue", "Crash report"]
    sensitive_bits = [
        " See https://tracker.example.com/{i} for history.",
        " Contact the maintainer at dev{i}@example.org if stuck.",
        " Screenshot: ![failure view](https://img.example.com/{i}.png)",
        " This affects acme/widget-{i} directly.",
        "",
    ]
    duplicates_planted = 0
    for i in range(n):
        bucket = i % 10
        name = f"{kinds[i % len(kinds)]} {i}"
        if bucket == 0:
            # missing about -> filter_null drop
            add(f"syn-{i:03d}", make_template_text(name, about="''"))
        elif bucket == 1 and i % 20 == 1:
            # no frontmatter at all -> parse failure
            add(f"syn-{i:03d}", f"just markdown, no metadata, row {i}\n")
        elif bucket == 2:
            # bodiless -> filter_null drop
            add(
                f"syn-{i:03d}",
                f"---\nname: {name}\nabout: Valid about\ntitle: ''\n"
                "labels: bug\nassignees: ''\n---\n",
            )
        elif bucket == 3:
            # CJK-dominant body -> script_filter drop
            sections = [("概要", "バグの説明をここに書いてください。再現手順も含めてください。")]
            add(f"syn-{i:03d}", make_template_text(name, sections=sections * 3))
        elif bucket == 4 and duplicates_planted < 20:
            # exact duplicate of a stable earlier record (bucket 5 shape)
            duplicates_planted += 1
            add(f"syn-{i:03d}", make_template_text("Recurring report", labels="bug"))
        elif bucket == 5:
            add(f"syn-{i:03d}", make_template_text("Recurring report", labels="bug"))
        else:
            extra = rng.choice(sensitive_bits).format(i=i)
            sections = rng.sample(_SECTION_POOL, k=rng.randint(2, 5))
            meta = {}
            labels = "bug" if i % 3 else "''"
            if i % 3 == 0:
                meta["labels"] = "needs-triage, bug"
            if i % 7 == 0:
                meta["assignees"] = "alice, bob"
            add(
                f"syn-{i:03d}",
                make_template_text(
                    f"{name}",
                    about=f"Report {name.lower()} with care",
                    labels=labels,
                    assignees="maintainer-one" if i % 5 == 0 else "''",
                    sections=sections,
                    body_suffix=extra,
                ),
                repo=f"acme/widget-{i}",
                meta=meta,
            )
    for record in records:
        try:
            record.parsed = parse_irt(record.raw)
        except IrtParseError as exc:
            record.diagnostic = str(exc)
    return records


@pytest.fixture()
def synthetic_corpus() -> list[CorpusRecord]:
    return build_synthetic_corpus()
