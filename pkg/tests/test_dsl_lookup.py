import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corvid.dsl import DslError, parse_lookup


def test_plain_line_is_identity_entry():
    table = parse_lookup("city", "Augsburg\n")
    assert table.entries[0].variants == ("Augsburg",)
    assert table.entries[0].canonical == "Augsburg"


def test_synonym_group_with_canonical():
    table = parse_lookup("city", "(New York|N Y)->New York\n")
    entry = table.entries[0]
    assert entry.variants == ("New York", "N Y")
    assert entry.canonical == "New York"


def test_plain_arrow_mapping():
    table = parse_lookup("city", "A->B\n")
    assert table.entries[0].variants == ("A",)
    assert table.entries[0].canonical == "B"


def test_group_without_arrow_takes_first_variant_as_canonical():
    table = parse_lookup("city", "(Koeln|Cologne)\n")
    assert table.entries[0].canonical == "Koeln"


def test_dangling_arrow_reports_line_one():
    with pytest.raises(DslError) as exc:
        parse_lookup("city", "->X\n")
    assert exc.value.line == 1
    assert exc.value.kind in ("dangling-arrow", "empty-variant")


def test_arrow_without_canonical_errors():
    with pytest.raises(DslError) as exc:
        parse_lookup("city", "A->\n")
    assert exc.value.kind == "dangling-arrow"


def test_empty_variant_in_group_errors():
    with pytest.raises(DslError) as exc:
        parse_lookup("city", "(|Y)\n")
    assert exc.value.kind == "empty-variant"


def test_unbalanced_group_reports_line_number():
    with pytest.raises(DslError) as exc:
        parse_lookup("city", "ok\n(X|Y\n")
    assert exc.value.line == 2
    assert exc.value.kind == "unbalanced"


def test_blank_lines_skipped():
    table = parse_lookup("city", "\nAugsburg\n\n\nBerlin\n")
    assert [e.canonical for e in table.entries] == ["Augsburg", "Berlin"]


def test_variant_lookup_is_case_insensitive_canonical_verbatim():
    table = parse_lookup("city", "(New York|N Y)->New York\nAugsburg\n")
    assert table.canonical_for("n y") == "New York"
    assert table.canonical_for("NEW YORK") == "New York"
    assert table.canonical_for("augsburg") == "Augsburg"
    assert table.canonical_for("unknown") is None


def test_escaped_metachars_in_variant():
    table = parse_lookup("x", r"\(special\)->plain" + "\n")
    assert table.entries[0].variants == ("(special)",)
    assert table.entries[0].canonical == "plain"


@settings(max_examples=150, deadline=None)
@given(st.text(min_size=1, max_size=40, alphabet=st.characters(
    blacklist_categories=("Cs",), blacklist_characters="\n")))
def test_case_insensitive_property(variant):
    trimmed = " ".join(variant.split())
    if not trimmed or any(c in "()|\\" for c in trimmed) or "->" in trimmed:
        return
    table = parse_lookup("t", trimmed + "\n")
    assert table.canonical_for(trimmed.upper()) == trimmed
    assert table.canonical_for(trimmed.lower()) == trimmed
