"""Text primitives: cleaning, sentence segmentation, tokenization, n-grams."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from hybridsum import porter

PUNCT = frozenset(".,;:!?\"'()")
_WS = re.compile(r"\s+")


def _read_list(path: str | Path | None, default_name: str) -> frozenset[str]:
    if path is None:
        text = resources.files("hybridsum.data").joinpath(default_name).read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    entries = (line.strip().lower() for line in text.splitlines())
    return frozenset(e for e in entries if e and not e.startswith("#"))


@lru_cache(maxsize=None)
def load_stopwords(path: str | None = None) -> frozenset[str]:
    return _read_list(path, "stopwords.txt")


@lru_cache(maxsize=None)
def load_abbreviations(path: str | None = None) -> frozenset[str]:
    return _read_list(path, "abbreviations.txt")


def clean_text(raw: str) -> str:
    """Collapse every whitespace run to one space and trim the ends."""
    return " ".join(raw.split())


def count_whitespace_tokens(text: str) -> int:
    return len(text.split())


@dataclass(frozen=True)
class Token:
    surface: str
    lower: str
    stem: str
    is_stopword: bool

    @property
    def is_punct(self) -> bool:
        return all(ch in PUNCT for ch in self.surface)


@dataclass(frozen=True)
class Sentence:
    index: int
    text: str
    tokens: tuple[Token, ...]

    @property
    def n_whitespace_tokens(self) -> int:
        return count_whitespace_tokens(self.text)


def make_token(surface: str, stopwords: frozenset[str] | None = None) -> Token:
    stopwords = load_stopwords() if stopwords is None else stopwords
    lower = surface.lower()
    return Token(surface, lower, porter.stem(lower), lower in stopwords)


def _split_chunk(chunk: str) -> list[str]:
    # Punctuation is only ever peeled from the chunk ends, so numbers like
    # $2.94, 1,681 or mid-90s are never broken apart.
    lead: list[str] = []
    i = 0
    while i < len(chunk) and chunk[i] in PUNCT:
        lead.append(chunk[i])
        i += 1
    trail: list[str] = []
    j = len(chunk)
    while j > i and chunk[j - 1] in PUNCT:
        trail.append(chunk[j - 1])
        j -= 1
    core = [chunk[i:j]] if j > i else []
    return lead + core + trail[::-1]


def tokenize(text: str, stopwords: frozenset[str] | None = None) -> list[Token]:
    """Whitespace split, then detach surrounding punctuation as separate tokens.

    >>> [t.surface for t in tokenize("q4 earnings per share $2.88.")]
    ['q4', 'earnings', 'per', 'share', '$2.88', '.']
    """
    stopwords = load_stopwords() if stopwords is None else stopwords
    return [make_token(piece, stopwords) for chunk in text.split() for piece in _split_chunk(chunk)]


def content_tokens(text: str, stopwords: frozenset[str] | None = None) -> list[Token]:
    """Tokens minus pure-punctuation ones; the unit all overlap metrics see."""
    return [t for t in tokenize(text, stopwords) if not t.is_punct]


_TERMINAL = re.compile(r"[.!?]+[\"')\]]*(?=\s)")


def _boundary_ok(text: str, end: int, abbreviations: frozenset[str]) -> bool:
    nxt = text[end:].lstrip()
    if not nxt:
        return False
    if not nxt[0].islower():
        return True
    # next word starts lowercase: split unless the word ending here is a known abbreviation
    word_start = text.rfind(" ", 0, end) + 1
    word = text[word_start:end].lower().lstrip("\"'(")
    return word not in abbreviations


def segment_sentences(
    text: str,
    stopwords: frozenset[str] | None = None,
    abbreviations: frozenset[str] | None = None,
) -> list[Sentence]:
    """Rule-based segmentation at ``.``, ``!``, ``?`` followed by whitespace.

    Decimal points never qualify (no whitespace follows them). When the next
    word is lowercase, the split is suppressed after a listed abbreviation.
    The input is cleaned first, so joining the sentence texts with single
    spaces reproduces ``clean_text(text)``.
    """
    abbreviations = load_abbreviations() if abbreviations is None else abbreviations
    text = clean_text(text)
    if not text:
        return []
    pieces = []
    start = 0
    for m in _TERMINAL.finditer(text):
        if _boundary_ok(text, m.end(), abbreviations):
            pieces.append(text[start : m.end()])
            start = m.end() + 1
    if start < len(text):
        pieces.append(text[start:])
    return [Sentence(i, p, tuple(tokenize(p, stopwords))) for i, p in enumerate(pieces)]


def ngrams(tokens, n: int, use_stems: bool = True) -> Counter:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    forms = [t.stem if use_stems else t.lower for t in tokens]
    return Counter(tuple(forms[i : i + n]) for i in range(len(forms) - n + 1))
