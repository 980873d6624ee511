from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from girt_forge.irt import (
    HeadlineStyle,
    IrtBody,
    IrtMetadata,
    IssueReportTemplate,
    MalformedFrontmatter,
    MissingFrontmatter,
    Section,
    dominant_style,
    parse_irt,
    render_irt,
    validate_irt,
)


def test_canonical_bug_metadata(canonical_bug_text):
    irt = parse_irt(canonical_bug_text)
    assert irt.metadata.name == "Bug report"
    assert irt.metadata.about == "Create a report to help us improve"
    assert irt.metadata.title == "[Bug]"
    assert irt.metadata.labels == ("bug",)
    assert irt.metadata.assignees == ()


def test_canonical_bug_sections(canonical_bug_text):
    irt = parse_irt(canonical_bug_text)
    assert [s.headline for s in irt.body.sections] == [
        "Describe the bug",
        "To Reproduce",
        "Expected behavior",
        "Screenshots (if appropriate)",
        "Environment",
        "Additional context",
    ]
    assert all(s.style == HeadlineStyle.heading(2) for s in irt.body.sections)
    assert irt.body.preamble == ""


def test_minimal_template():
    irt = parse_irt("---\nname: A\nabout: B\n---\nhello")
    assert irt.metadata.name == "A"
    assert irt.metadata.about == "B"
    assert irt.metadata.title == ""
    assert irt.metadata.labels == ()
    assert irt.metadata.assignees == ()
    assert irt.body.preamble == "hello"
    assert irt.body.sections == ()


def test_missing_frontmatter():
    with pytest.raises(MissingFrontmatter) as excinfo:
        parse_irt("no frontmatter here")
    assert excinfo.value.line == 1


def test_unterminated_frontmatter():
    with pytest.raises(MissingFrontmatter):
        parse_irt("---\nname: A\nabout: B\nbody text")


def test_malformed_frontmatter_line_number():
    with pytest.raises(MalformedFrontmatter) as excinfo:
        parse_irt("---\nname: A\nnot a key value\n---\nbody")
    assert excinfo.value.line == 3


def test_unknown_keys_preserved_round_trip():
    src = "---\nname: A\nabout: B\nref: keepme\n---\n\n## S\ntext\n"
    irt = parse_irt(src)
    assert irt.metadata.extras == (("ref", "keepme"),)
    assert "ref: keepme" in render_irt(irt)
    assert parse_irt(render_irt(irt)) == irt


def test_bold_headlines():
    irt = parse_irt("---\nname: A\nabout: B\n---\n\n**Summary**\ntext here\n")
    section = irt.body.sections[0]
    assert section.headline == "Summary"
    assert section.style == HeadlineStyle.bold()


def test_bold_mid_line_is_not_headline():
    irt = parse_irt("---\nname: A\nabout: B\n---\n\nuse **bold** words\n")
    assert irt.body.sections == ()
    assert irt.body.preamble == "use **bold** words"


def test_hash_without_space_is_content():
    irt = parse_irt("---\nname: A\nabout: B\n---\n\n#nospace\n")
    assert irt.body.sections == ()
    assert irt.body.preamble == "#nospace"


def test_headlines_inside_code_fence_ignored():
    src = "---\nname: A\nabout: B\n---\n\n## Real\n```\n# not a headline\n```\n"
    irt = parse_irt(src)
    assert [s.headline for s in irt.body.sections] == ["Real"]
    assert "# not a headline" in irt.body.sections[0].content


def test_bracketed_labels():
    irt = parse_irt("---\nname: A\nabout: B\nlabels: [bug, 'ci']\n---\nx")
    assert irt.metadata.labels == ("bug", "ci")


def test_comma_labels_and_assignees():
    irt = parse_irt(
        "---\nname: A\nabout: B\nlabels: bug, help wanted\nassignees: alice, bob\n---\nx"
    )
    assert irt.metadata.labels == ("bug", "help wanted")
    assert irt.metadata.assignees == ("alice", "bob")


def test_render_fixed_key_order_and_quoting():
    irt = IssueReportTemplate(
        IrtMetadata(name="N", about="A", title="", labels=(), assignees=()),
        IrtBody(preamble="p"),
    )
    text = render_irt(irt)
    assert text.startswith(
        "---\nname: N\nabout: A\ntitle: ''\nlabels: ''\nassignees: ''\n---\n"
    )
    assert text.endswith("\n")


def test_render_empty_assignees_quoted(canonical_bug_text):
    assert "assignees: ''" in render_irt(parse_irt(canonical_bug_text))


def test_canonical_bug_renders_byte_identical(canonical_bug_text):
    assert render_irt(parse_irt(canonical_bug_text)) == canonical_bug_text


def test_render_deterministic(canonical_bug_text):
    irt = parse_irt(canonical_bug_text)
    assert render_irt(irt) == render_irt(irt)


def test_validate_canonical_bug_clean(canonical_bug_text):
    assert validate_irt(parse_irt(canonical_bug_text)) == []


def test_validate_missing_about():
    irt = parse_irt("---\nname: A\n---\nbody")
    codes = [v.code for v in validate_irt(irt)]
    assert codes == ["MissingAbout"]


def test_validate_empty_body():
    irt = parse_irt("---\nname: A\nabout: B\n---\n")
    codes = [v.code for v in validate_irt(irt)]
    assert codes == ["EmptyBody"]


def test_validate_names_field():
    irt = parse_irt("---\nabout: B\n---\n")
    report = validate_irt(irt)
    assert {(v.code, v.field) for v in report} == {
        ("MissingName", "name"),
        ("EmptyBody", "body"),
    }


def test_corpus_round_trip(template_corpus):
    for record in template_corpus:
        first = parse_irt(record.raw)
        assert parse_irt(render_irt(first)) == first, record.id


def test_dominant_style_majority_and_tie():
    h2 = HeadlineStyle.heading(2)
    bold = HeadlineStyle.bold()
    body = IrtBody(sections=(Section("a", h2), Section("b", bold), Section("c", h2)))
    assert dominant_style(body) == h2
    tied = IrtBody(sections=(Section("a", h2), Section("b", bold)))
    assert dominant_style(tied) == h2  # ties break toward headings
    all_bold = IrtBody(sections=(Section("a", bold), Section("b", bold)))
    assert dominant_style(all_bold) == bold


def test_heading_level_bounds():
    with pytest.raises(ValueError):
        HeadlineStyle.heading(7)
    with pytest.raises(ValueError):
        HeadlineStyle.heading(0)


_name_text = st.text(
    alphabet=st.characters(whitelist_categories=["Lu", "Ll", "Nd"], max_codepoint=0x24F),
    min_size=1,
    max_size=12,
)
_content_text = st.text(
    alphabet=st.characters(blacklist_characters="\r", max_codepoint=0x24F),
    max_size=80,
).map(lambda s: "\n".join(line for line in s.split("\n") if not line.startswith(("#", "**", "---", "```"))).strip())

_sections = st.lists(
    st.tuples(
        _name_text,
        st.one_of(
            st.integers(min_value=1, max_value=6).map(HeadlineStyle.heading),
            st.just(HeadlineStyle.bold()),
        ),
        _content_text,
    ),
    max_size=5,
)


@settings(max_examples=60, deadline=None)
@given(name=_name_text, about=_name_text, title=_name_text,
       labels=st.lists(_name_text, max_size=3), sections=_sections)
def test_render_parse_round_trip_property(name, about, title, labels, sections):
    irt = IssueReportTemplate(
        IrtMetadata(
            name=name, about=about, title=title,
            labels=tuple(labels), assignees=(),
        ),
        IrtBody(sections=tuple(Section(h, style, c) for h, style, c in sections)),
    )
    reparsed = parse_irt(render_irt(irt))
    assert parse_irt(render_irt(reparsed)) == reparsed


@settings(max_examples=40, deadline=None)
@given(name=_name_text, about=_name_text, body=_name_text)
def test_validator_soundness(name, about, body):
    # valid iff all three rules hold; mutate each field to empty in turn
    full = IssueReportTemplate(
        IrtMetadata(name=name, about=about), IrtBody(preamble=body)
    )
    assert validate_irt(full) == []
    assert any(v.code == "MissingName" for v in validate_irt(
        IssueReportTemplate(IrtMetadata(name="", about=about), IrtBody(preamble=body))))
    assert any(v.code == "MissingAbout" for v in validate_irt(
        IssueReportTemplate(IrtMetadata(name=name, about=""), IrtBody(preamble=body))))
    assert any(v.code == "EmptyBody" for v in validate_irt(
        IssueReportTemplate(IrtMetadata(name=name, about=about), IrtBody())))
