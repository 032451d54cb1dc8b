import re
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hybridsum import porter
from hybridsum.textproc import (
    clean_text,
    content_tokens,
    count_whitespace_tokens,
    load_stopwords,
    ngrams,
    segment_sentences,
    tokenize,
)

GENERATED_SUMMARY = (
    "compname reports q4 adjusted earnings per share of $2.94.\n"
    "compname posts fourth quarter 2021 adjusted earnings of $1.3 billion, or $5.70 per diluted share.\n"
    "q4 adjusted pre-tax income of $3.1 billion, an increase of $26 million from the prior quarter.\n"
    "expects q1 global o&p utilization rate to be in the mid-90s."
)


@pytest.mark.parametrize(
    "raw, expected",
    [("a  b\n c ", "a b c"), ("", ""), ("$2.94\t eps", "$2.94 eps"), ("   ", "")],
)
def test_clean_text(raw, expected):
    assert clean_text(raw) == expected


@given(st.text())
def test_clean_text_idempotent(s):
    assert clean_text(clean_text(s)) == clean_text(s)


@given(st.text())
def test_clean_text_has_no_whitespace_runs(s):
    out = clean_text(s)
    assert out == out.strip()
    assert not re.search(r"\s\s", out)
    assert all(not ch.isspace() or ch == " " for ch in out)


def test_segment_period_boundary():
    assert [s.text for s in segment_sentences("eps was $2.94. revenue grew.")] == ["eps was $2.94.", "revenue grew."]


def test_segment_decimal_is_not_boundary():
    assert len(segment_sentences("eps was $2.94 this quarter")) == 1


def test_segment_generated_summary_block():
    # one sentence per line of the generated summary
    sents = segment_sentences(GENERATED_SUMMARY)
    assert [s.text for s in sents] == [clean_text(line) for line in GENERATED_SUMMARY.splitlines()]
    assert [s.index for s in sents] == [0, 1, 2, 3]


def test_segment_abbreviation_guard():
    text = "shares of acme inc. rose sharply. Revenue in q4. fell 3%. Next question."
    assert [s.text for s in segment_sentences(text)] == [
        "shares of acme inc. rose sharply.",
        "Revenue in q4. fell 3%.",
        "Next question.",
    ]


def test_segment_question_and_quote():
    sents = segment_sentences('Is that right? "Yes," he said. 2022 looks good!')
    assert [s.text for s in sents] == ["Is that right?", '"Yes," he said.', "2022 looks good!"]


def test_segment_empty():
    assert segment_sentences("") == []
    assert segment_sentences("  \n ") == []


@given(st.text(alphabet=st.sampled_from(list("ab .?!$2\n'Q"))))
def test_segmentation_is_loss_free(s):
    sents = segment_sentences(s)
    assert " ".join(x.text for x in sents) == clean_text(s)
    assert all(x.tokens for x in sents)
    assert [x.index for x in sents] == list(range(len(sents)))


def test_tokenize_detaches_trailing_punct_but_not_numbers():
    toks = tokenize("q4 earnings per share $2.88.")
    assert [t.surface for t in toks] == ["q4", "earnings", "per", "share", "$2.88", "."]


@pytest.mark.parametrize(
    "text, surfaces",
    [
        ("", []),
        ("a b", ["a", "b"]),
        ("1,681 samples, mid-90s", ["1,681", "samples", ",", "mid-90s"]),
        ('("Phillips 66")', ["(", '"', "Phillips", "66", '"', ")"]),
    ],
)
def test_tokenize_cases(text, surfaces):
    assert [t.surface for t in tokenize(text)] == surfaces


def test_token_fields():
    (t,) = tokenize("Earnings")
    assert (t.surface, t.lower, t.stem, t.is_stopword) == ("Earnings", "earnings", "earn", False)
    assert tokenize("The")[0].is_stopword


def test_content_tokens_drop_punctuation():
    assert [t.surface for t in content_tokens("up 14%, to $812 million.")] == ["up", "14%", "to", "$812", "million"]


def test_whitespace_count_ignores_punctuation_detachment():
    assert count_whitespace_tokens("q4 earnings per share $2.88.") == 5


@given(st.text())
def test_tokenize_deterministic(s):
    assert tokenize(s) == tokenize(s)


def test_ngrams():
    toks = tokenize("the cat sat")
    assert ngrams(toks, 2, use_stems=False) == Counter({("the", "cat"): 1, ("cat", "sat"): 1})
    assert ngrams(tokenize("a a a"), 1) == Counter({("a",): 3})
    assert ngrams(tokenize("a b"), 3) == Counter()
    with pytest.raises(ValueError):
        ngrams(toks, 0)


@given(st.lists(st.sampled_from(["a", "b", "cats", "ran"]), max_size=12), st.integers(1, 5))
def test_ngram_count_identity(words, n):
    toks = tokenize(" ".join(words))
    assert sum(ngrams(toks, n).values()) == max(0, len(toks) - n + 1)


def test_stopword_list_is_pinned():
    sw = load_stopwords()
    assert 120 <= len(sw) <= 140
    assert {"the", "of", "and"} <= sw
    assert "revenue" not in sw


# classic examples from the original algorithm description, full pipeline outputs
@pytest.mark.parametrize(
    "word, expected",
    [
        ("caresses", "caress"), ("ponies", "poni"), ("ties", "ti"), ("cats", "cat"),
        ("feed", "feed"), ("agreed", "agre"), ("plastered", "plaster"), ("bled", "bled"),
        ("motoring", "motor"), ("sing", "sing"), ("hopping", "hop"), ("falling", "fall"),
        ("hissing", "hiss"), ("filing", "file"), ("happy", "happi"), ("sky", "sky"),
        ("relational", "relat"), ("generalizations", "gener"), ("earnings", "earn"),
        ("adjustment", "adjust"), ("utilization", "util"), ("controll", "control"),
        ("as", "as"), ("is", "is"),
    ],
)
def test_porter_examples(word, expected):
    assert porter.stem(word) == expected


def test_porter_matches_reference_implementation():
    nltk_porter = pytest.importorskip("nltk.stem.porter")
    ref = nltk_porter.PorterStemmer(mode=nltk_porter.PorterStemmer.ORIGINAL_ALGORITHM)
    from pathlib import Path

    text = (Path(__file__).parent / "fixtures" / "fixture_corpus.jsonl").read_text()
    text += " ".join(load_stopwords())
    text += (
        " conditional rational valenci hesitanci digitizer conformabli radicalli differentli vileli"
        " analogousli vietnamization predication operator feudalism decisiveness hopefulness"
        " callousness formaliti sensitiviti sensibiliti triplicate formative formalize electriciti"
        " electrical hopeful goodness revival allowance inference airliner gyroscopic adjustable"
        " defensible irritant replacement adoption homologou communism activate angulariti"
        " homologous effective bowdlerize probate rate cease controlling rolling generously"
    )
    words = {w for w in re.findall(r"[a-z]+", text.lower()) if len(w) > 2}
    assert len(words) > 150
    for w in sorted(words):
        assert porter.stem(w) == ref.stem(w), w
