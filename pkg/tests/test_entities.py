import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridsum.entities import (
    ATOMIC_KINDS,
    KINDS,
    EntityList,
    entity_match,
    extract_entities,
    load_patterns,
    normalize,
    parse_patterns,
)

from generators import ENTITY_SURFACES, entity_text


def kinds_and_norms(text, **kw):
    return [(e.kind, e.normalized) for e in extract_entities(text, **kw)]


def test_quarter_and_money_in_summary_line():
    assert kinds_and_norms("compname reports q4 adjusted earnings per share of $2.94.") == [
        ("Quarter", "q4"),
        ("Money", "2.94@e0"),
    ]


@pytest.mark.parametrize(
    "text, expected",
    [
        ("income was $668 million, up", [("Money", "668@e6")]),
        ("€1.95bn", [("Money", "1.95@e9")]),
        ("US$ 12m", [("Money", "12@e6")]),
        ("$1,250", [("Money", "1250@e0")]),
        ("up 9 percent", [("Percent", "9%")]),
        ("margin of 38.5%", [("Percent", "38.5%")]),
        ("1,250 million units", [("CardinalScaled", "1250@e6")]),
        ("the fourth quarter", [("Quarter", "q4")]),
        ("1st-quarter", [("Quarter", "q1")]),
        ("Q3 results", [("Quarter", "q3")]),
        ("for FY 2022", [("FiscalYear", "fy2022")]),
        ("in 2021 we", [("FiscalYear", "2021")]),
        ("listed on NYSE today", [("Ticker", "nyse")]),
        ("welcome to Phillips 66 today", [("ProperNoun", "phillips 66")]),
        ("thanks, Mark Lashier said", [("ProperNoun", "mark lashier")]),
    ],
)
def test_kinds_and_normalization(text, expected):
    assert kinds_and_norms(text) == expected


def test_numbers_without_unit_are_not_entities():
    assert kinds_and_norms("we shipped 1,250 units and 3.5 tons") == []


def test_money_wins_over_contained_cardinal():
    ents = extract_entities("raised $3.1 billion")
    assert [(e.kind, e.surface) for e in ents] == [("Money", "$3.1 billion")]


def test_single_capitalized_word_at_sentence_start_is_not_a_name():
    assert kinds_and_norms("Chemicals income rose. Refining fell.") == []
    assert kinds_and_norms("we met Refining today") == [("ProperNoun", "refining")]


def test_proper_noun_stopwords_trimmed():
    assert kinds_and_norms("said The Board") == [("ProperNoun", "board")]


def test_kind_filter():
    text = "q4 earnings of $2.94 at Phillips 66"
    assert kinds_and_norms(text, kinds={"Money"}) == [("Money", "2.94@e0")]


def test_spans_point_at_surfaces():
    text = "Phillips 66 posted q4 EPS of $2.94 and 91% utilization in 2021."
    for e in extract_entities(text):
        assert text[e.span[0] : e.span[1]] == e.surface


@settings(max_examples=200)
@given(st.integers(0, 2**32 - 1))
def test_entities_are_ordered_and_non_overlapping(seed):
    text = entity_text(np.random.default_rng(seed))
    ents = list(extract_entities(text))
    for a, b in zip(ents, ents[1:]):
        assert a.span[1] <= b.span[0]
    assert all(e.kind in KINDS for e in ents)


@pytest.mark.parametrize("surface", ENTITY_SURFACES)
def test_each_pool_surface_extracts_as_one_entity(surface):
    ents = extract_entities(f"we saw {surface} today")
    assert [e.surface for e in ents] == [surface]


def test_as_set_and_representatives():
    ents = extract_entities("$2.94 and $2.94 and $9.99")
    assert len(ents) == 3
    assert ents.as_set == {"2.94@e0", "9.99@e0"}
    assert [e.span for e in ents.representatives()] == [ents.entities[0].span, ents.entities[2].span]


def test_normalize_direct():
    assert normalize("Money", "$1.3 Billion") == "1.3@e9"
    assert normalize("Quarter", "Fourth Quarter") == "q4"
    assert normalize("ProperNoun", "Phillips  66") == "phillips 66"


def test_pattern_file_versioned_and_complete():
    assert {p.kind for p in load_patterns()} == set(KINDS)


def test_parse_patterns_rejects_bad_lines():
    with pytest.raises(ValueError):
        parse_patterns("Money\t1")
    with pytest.raises(ValueError):
        parse_patterns("Weird\t1\tx")


def _match(surface, target_text):
    (e,) = extract_entities(f"we met {surface} there")
    return entity_match(e, target_text, extract_entities(target_text))


def test_match_exact_normalized():
    assert _match("$1.3 billion", "earnings of $1.3 Billion")
    assert _match("fourth quarter", "q4 was strong")


def test_money_mismatch():
    assert not _match("$3.1 billion", "adjusted pre-tax income of $668 million")


def test_atomic_kinds_never_partial_match():
    assert not _match("$3.1 billion", "a billion reasons")
    assert "Money" in ATOMIC_KINDS


def test_multiword_name_partial_match():
    assert _match("Global Refining", "refining margins improved")
    assert not _match("Global Refining", "the globe spun")


def test_single_word_name_needs_exact_match():
    assert not _match("NYSE", "nyse-listed")
    assert _match("NYSE", "listed on NYSE")


def test_match_empty_target():
    (e,) = extract_entities("we met Mark Lashier")
    assert not entity_match(e, "", EntityList())


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_every_entity_matches_its_own_text(seed):
    text = entity_text(np.random.default_rng(seed))
    ents = extract_entities(text)
    assert all(entity_match(e, text, ents) for e in ents)
