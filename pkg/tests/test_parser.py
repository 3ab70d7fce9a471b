"""Markup front end: headers, config regions, scalars, round-trips."""
import pytest
from hypothesis import given, strategies as st

from fidyll.parser import (
    ConfigEntry,
    parse,
    parse_scalar,
    to_markup,
)
from fidyll.source import SourceDocument


def parse_text(text: str):
    return parse(SourceDocument.from_text(text))


def errors_of(result) -> list[str]:
    return [d.message for d in result.diagnostics if d.severity == "error"]


MINIMAL = """\
---
title: Tiny
---

Opening paragraph.

{scene}
graphic: plot
parameters:
  x: 1

Stage one text.
"""


def test_minimal_document_shape():
    result = parse_text(MINIMAL)
    assert result.ok
    doc = result.document
    assert doc.front_matter["title"].value == "Tiny"
    assert [p.text for p in doc.leading_text] == ["Opening paragraph."]
    assert len(doc.blocks) == 1
    block = doc.blocks[0]
    assert block.kind == "scene"
    assert block.config["graphic"].value == "plot"
    assert block.config["parameters"].value["x"].value == 1
    assert [p.text for p in block.paragraphs] == ["Stage one text."]


def test_soft_wrapped_paragraph_joins_lines():
    result = parse_text("One line\nwraps onto\nanother.\n\nSecond paragraph.\n")
    assert result.ok
    texts = [p.text for p in result.document.leading_text]
    assert texts == ["One line wraps onto another.", "Second paragraph."]


def test_paragraph_spans_are_one_based():
    result = parse_text("First.\n\nSecond\nstill second.\n")
    spans = [p.span for p in result.document.leading_text]
    assert spans[0].start_line == 1
    assert spans[1].start_line == 3
    assert spans[1].end_line == 4


def test_front_matter_is_optional():
    result = parse_text("Just prose, no metadata.\n")
    assert result.ok
    assert result.document.front_matter == {}


def test_unterminated_front_matter_is_an_error():
    result = parse_text("---\ntitle: Oops\n")
    assert not result.ok
    assert any("front matter" in m for m in errors_of(result))


def test_front_matter_allows_blank_lines():
    result = parse_text("---\ntitle: A\n\nauthors: B\n---\n")
    assert result.ok
    assert set(result.document.front_matter) == {"title", "authors"}


def test_crlf_sources_normalize():
    result = parse_text("---\r\ntitle: A\r\n---\r\n\r\nText.\r\n")
    assert result.ok
    assert result.document.front_matter["title"].value == "A"


def test_unknown_block_header_fails():
    result = parse_text("{chapter}\n")
    assert not result.ok
    assert any("unknown block header" in m for m in errors_of(result))


def test_stage_requires_a_scene():
    result = parse_text("{stage}\n\nText.\n")
    assert not result.ok
    assert any("outside a scene" in m for m in errors_of(result))


def test_stage_after_conclusion_fails():
    result = parse_text("{scene}\ngraphic: g\n\n{conclusion}\n\n{stage}\n")
    assert not result.ok


def test_scene_after_conclusion_fails():
    result = parse_text("{conclusion}\n\nDone.\n\n{scene}\ngraphic: g\n")
    assert not result.ok
    assert any("after {conclusion}" in m for m in errors_of(result))


def test_duplicate_conclusion_fails():
    result = parse_text("{conclusion}\n\nA.\n\n{conclusion}\n\nB.\n")
    assert not result.ok
    assert any("duplicate {conclusion}" in m for m in errors_of(result))


def test_config_region_ends_at_blank_line():
    # `after: text` sits below the blank line, so it is prose, not config
    result = parse_text("{scene}\ngraphic: g\n\nafter: text\n")
    assert result.ok
    block = result.document.blocks[0]
    assert list(block.config) == ["graphic"]
    assert [p.text for p in block.paragraphs] == ["after: text"]


def test_config_region_ends_at_non_key_line():
    result = parse_text("{scene}\ngraphic: g\nThis sentence is prose.\n")
    assert result.ok
    block = result.document.blocks[0]
    assert list(block.config) == ["graphic"]
    assert block.paragraphs[0].text == "This sentence is prose."


def test_nested_config_trees():
    text = (
        "{scene}\n"
        "graphic:\n"
        "  name: sim\n"
        "  command: python3 render.py\n"
        "parameters:\n"
        "  rate: 0.5\n"
    )
    result = parse_text(text)
    assert result.ok
    config = result.document.blocks[0].config
    graphic = config["graphic"].value
    assert graphic["name"].value == "sim"
    assert graphic["command"].value == "python3 render.py"
    assert config["parameters"].value["rate"].value == 0.5


def test_three_levels_of_nesting_parse():
    text = "{scene}\ngraphic: g\ncontrols:\n  rate:\n    range: [0, 1, 0.5]\n"
    result = parse_text(text)
    assert result.ok
    controls = result.document.blocks[0].config["controls"].value
    assert controls["rate"].value["range"].value == [0, 1, 0.5]


def test_fourth_nesting_level_rejected():
    text = "{scene}\ngraphic: g\na:\n  b:\n    c:\n      d: 1\n"
    result = parse_text(text)
    assert not result.ok
    assert any("exceeds" in m for m in errors_of(result))


def test_tabs_in_config_rejected():
    result = parse_text("{scene}\ngraphic:\n\tname: g\n")
    assert not result.ok
    assert any("tabs" in m for m in errors_of(result))


def test_odd_indentation_rejected():
    result = parse_text("{scene}\ngraphic:\n   name: g\n")
    assert not result.ok
    assert any("2-space" in m for m in errors_of(result))


def test_over_indented_child_rejected():
    result = parse_text("{scene}\ngraphic:\n    name: g\n")
    assert not result.ok
    assert any("over-indented" in m for m in errors_of(result))


def test_duplicate_key_rejected():
    result = parse_text("{scene}\ngraphic: a\ngraphic: b\n")
    assert not result.ok
    assert any("duplicate key" in m for m in errors_of(result))


def test_diagnostics_carry_line_numbers():
    result = parse_text("---\ntitle: A\n---\n{scene}\ngraphic: a\ngraphic: b\n")
    errors = [d for d in result.diagnostics if d.severity == "error"]
    assert errors[0].line == 6


# scalar grammar


@pytest.mark.parametrize(
    "token,expected",
    [
        ("true", True),
        ("false", False),
        ("0", 0),
        ("-3", -3),
        ("+7", 7),
        ("0.5", 0.5),
        (".5", 0.5),
        ("1e3", 1000.0),
        ("-2.5E-1", -0.25),
        ("hello", "hello"),
        ("two words", "two words"),
        ('"true"', "true"),
        ('"0.5"', "0.5"),
        ('"with \\"quotes\\""', 'with "quotes"'),
        ("[]", []),
        ("[1, 2, 3]", [1, 2, 3]),
        ("[a, true, 0.5]", ["a", True, 0.5]),
        ('["a, b", c]', ["a, b", "c"]),
    ],
)
def test_parse_scalar_table(token, expected):
    assert parse_scalar(token) == expected


def test_parse_scalar_preserves_int_vs_float():
    assert type(parse_scalar("2")) is int
    assert type(parse_scalar("2.0")) is float
    assert type(parse_scalar("true")) is bool


def test_unbalanced_quote_is_an_error():
    with pytest.raises(ValueError):
        parse_scalar('"unclosed')


def test_unbalanced_bracket_is_an_error():
    with pytest.raises(ValueError):
        parse_scalar("[1, 2")


def test_nested_list_rejected():
    with pytest.raises(ValueError):
        parse_scalar("[[1], 2]")


# round trip: serialize then reparse


def assert_tree_equal(a, b):
    assert set(a) == set(b)
    for key in a:
        av, bv = a[key].value, b[key].value
        if isinstance(av, dict):
            assert isinstance(bv, dict)
            assert_tree_equal(av, bv)
        else:
            assert av == bv and type(av) is type(bv)


def test_to_markup_round_trip():
    text = (
        "---\n"
        "title: Round Trip\n"
        "authors: [A, B]\n"
        "---\n\n"
        "Lead paragraph.\n\n"
        "{scene}\n"
        "graphic:\n"
        "  name: sim\n"
        "  command: python3 r.py\n"
        "parameters:\n"
        "  rate: 0.5\n"
        "  label: \"7\"\n\n"
        "Scene text.\n\n"
        "{stage}\n"
        "parameters:\n"
        "  rate: 1\n\n"
        "Stage text.\n"
    )
    first = parse_text(text)
    assert first.ok
    second = parse_text(to_markup(first.document))
    assert second.ok
    assert_tree_equal(first.document.front_matter, second.document.front_matter)
    assert len(first.document.blocks) == len(second.document.blocks)
    for a, b in zip(first.document.blocks, second.document.blocks):
        assert a.kind == b.kind
        assert_tree_equal(a.config, b.config)
        assert [p.text for p in a.paragraphs] == [p.text for p in b.paragraphs]


scalar_values = st.one_of(
    st.booleans(),
    st.integers(min_value=-10**6, max_value=10**6),
    st.floats(allow_nan=False, allow_infinity=False, width=32),
    st.text(
        alphabet=st.characters(blacklist_categories=("Cs", "Cc")),
        max_size=12,
    ).filter(lambda s: "\n" not in s),
)


@given(st.lists(scalar_values, max_size=5))
def test_scalar_markup_round_trip(values):
    """Any scalar list survives markup_scalar -> parse_scalar unchanged."""
    from fidyll.scalars import canonical_value, markup_scalar

    canonical = [canonical_value(v) for v in values]
    token = markup_scalar(canonical)
    parsed = parse_scalar(token)
    assert [canonical_value(v) for v in parsed] == canonical
