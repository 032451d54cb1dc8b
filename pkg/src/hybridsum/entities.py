"""Pattern-based financial entity extraction and the partial-match predicate."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from hybridsum.textproc import PUNCT, load_stopwords, tokenize

KINDS = ("Money", "Percent", "CardinalScaled", "Quarter", "FiscalYear", "Ticker", "ProperNoun")

# Quantities are atomic: "$3.1 billion" must not partially match on "billion".
ATOMIC_KINDS = frozenset({"Money", "Percent", "CardinalScaled", "Quarter", "FiscalYear"})

MACROS = {
    "NUM": r"(?:(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?|\.\d+)(?!\d)",
    "SCALE": r"thousand|million|billion|trillion|mln|bln|bn|mn",
}

SCALES = {
    "thousand": "e3", "k": "e3",
    "million": "e6", "mln": "e6", "mn": "e6", "m": "e6",
    "billion": "e9", "bln": "e9", "bn": "e9", "b": "e9",
    "trillion": "e12",
}

_ORDINALS = {"first": "1", "second": "2", "third": "3", "fourth": "4", "1st": "1", "2nd": "2", "3rd": "3", "4th": "4"}


@dataclass(frozen=True)
class Pattern:
    kind: str
    priority: int
    regex: re.Pattern


@dataclass(frozen=True)
class Entity:
    surface: str
    kind: str
    span: tuple[int, int]
    normalized: str
    words: tuple[str, ...]

    @property
    def is_multiword(self) -> bool:
        return len(self.normalized.split()) > 1


@dataclass(frozen=True)
class EntityList:
    entities: tuple[Entity, ...] = ()
    as_set: frozenset[str] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "as_set", frozenset(e.normalized for e in self.entities))

    def __len__(self):
        return len(self.entities)

    def __iter__(self):
        return iter(self.entities)

    def representatives(self) -> list[Entity]:
        """First occurrence of each distinct normalized form, in document order."""
        seen: dict[str, Entity] = {}
        for e in self.entities:
            seen.setdefault(e.normalized, e)
        return list(seen.values())


def parse_patterns(text: str) -> list[Pattern]:
    patterns = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        try:
            kind, priority, regex = line.split("\t", 2)
        except ValueError:
            raise ValueError(f"pattern line {lineno}: expected 3 tab-separated columns") from None
        if kind not in KINDS:
            raise ValueError(f"pattern line {lineno}: unknown kind {kind!r}")
        for name, body in MACROS.items():
            regex = regex.replace("{" + name + "}", body)
        patterns.append(Pattern(kind, int(priority), re.compile(regex)))
    return patterns


@lru_cache(maxsize=None)
def load_patterns(path: str | None = None) -> tuple[Pattern, ...]:
    if path is None:
        text = resources.files("hybridsum.data").joinpath("entity_patterns.tsv").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    return tuple(parse_patterns(text))


def _scaled(number: str, scale: str | None) -> str:
    value = number.replace(",", "")
    return f"{value}@{SCALES[scale.lower()] if scale else 'e0'}"


_MONEY_PARTS = re.compile(r"(?:us\$|[$€£¥])\s?([\d.,]+)\s?([a-z]+)?$", re.I)
_CARDINAL_PARTS = re.compile(r"([\d.,]+)\s([a-z]+)$", re.I)


def normalize(kind: str, surface: str) -> str:
    s = surface.lower()
    if kind == "Money":
        m = _MONEY_PARTS.match(s)
        return _scaled(m.group(1), m.group(2)) if m else s.replace(",", "")
    if kind == "CardinalScaled":
        m = _CARDINAL_PARTS.match(s)
        return _scaled(m.group(1), m.group(2)) if m else s.replace(",", "")
    if kind == "Percent":
        num = re.match(r"[\d.,]+", s).group(0)
        return num.replace(",", "") + "%"
    if kind == "Quarter":
        if s.startswith("q"):
            return s
        return "q" + _ORDINALS[re.split(r"[\s-]", s)[0]]
    if kind == "FiscalYear":
        return re.sub(r"[\s']", "", s)
    return " ".join(s.replace(",", "").split())


def _words(normalized: str, stopwords: frozenset[str]) -> tuple[str, ...]:
    return tuple(w for w in normalized.split() if w not in stopwords)


def _at_sentence_start(text: str, pos: int) -> bool:
    before = text[:pos].rstrip()
    return not before or before[-1] in ".!?"


def _trim_proper_noun(text: str, start: int, end: int, stopwords: frozenset[str]):
    """Drop leading/trailing stopwords and trailing numbers from a capitalized run."""
    parts = [(m.start() + start, m.end() + start) for m in re.finditer(r"\S+", text[start:end])]
    while parts and text[parts[0][0] : parts[0][1]].lower() in stopwords:
        parts.pop(0)
    while parts and text[parts[-1][0] : parts[-1][1]].lower() in stopwords:
        parts.pop()
    if not parts or not text[parts[0][0]].isupper():
        return None
    return parts[0][0], parts[-1][1], len(parts)


def _candidates(text: str, patterns, kinds, stopwords):
    for pat in patterns:
        if kinds is not None and pat.kind not in kinds:
            continue
        for m in pat.regex.finditer(text):
            start, end = m.span()
            if pat.kind == "ProperNoun":
                trimmed = _trim_proper_noun(text, start, end, stopwords)
                if trimmed is None:
                    continue
                run_start = start
                start, end, n_words = trimmed
                if n_words < 2 and _at_sentence_start(text, run_start):
                    continue
            if end > start:
                yield pat.priority, start, end, pat.kind


def extract_entities(
    text: str,
    patterns=None,
    kinds=None,
    stopwords: frozenset[str] | None = None,
) -> EntityList:
    """Extract non-overlapping entities in document order.

    Candidates from every pattern compete for character spans: lower priority
    number first, then the longer span, then the earlier one.
    """
    patterns = load_patterns() if patterns is None else patterns
    stopwords = load_stopwords() if stopwords is None else stopwords
    cands = sorted(_candidates(text, patterns, kinds, stopwords), key=lambda c: (c[0], c[1] - c[2], c[1]))
    taken: list[tuple[int, int, str]] = []
    for _, start, end, kind in cands:
        if any(start < e and s < end for s, e, _ in taken):
            continue
        taken.append((start, end, kind))
    out = []
    for start, end, kind in sorted(taken):
        surface = text[start:end]
        norm = normalize(kind, surface)
        out.append(Entity(surface, kind, (start, end), norm, _words(norm, stopwords)))
    return EntityList(tuple(out))


def text_words(text: str) -> frozenset[str]:
    """Case-folded whitespace tokens of ``text`` with surrounding punctuation removed."""
    return frozenset(t.lower for t in tokenize(text) if not all(ch in PUNCT for ch in t.surface))


def entity_match(e: Entity, target_text: str, target: EntityList, target_words: frozenset[str] | None = None) -> bool:
    """Exact normalized membership, or a partial hit for multi-word names.

    A multi-word, non-quantity entity matches when any of its non-stopword
    constituents occurs as a token of the target text.
    """
    if e.normalized in target.as_set:
        return True
    if e.kind in ATOMIC_KINDS or not e.is_multiword:
        return False
    if target_words is None:
        target_words = text_words(target_text)
    return any(w in target_words for w in e.words)
