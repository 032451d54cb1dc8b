"""LexRank sentence centrality and budgeted extractive selection."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, replace

import numpy as np

from hybridsum.textproc import Sentence, segment_sentences


@dataclass(frozen=True)
class SelectionBudget:
    max_sentences: int = 15
    max_tokens: int = 4000
    damping: float = 0.85
    epsilon: float = 1e-6
    max_iterations: int = 100
    threshold: float | None = None

    def __post_init__(self):
        if self.max_sentences < 1 or self.max_tokens < 1:
            raise ValueError("max_sentences and max_tokens must be >= 1")
        if not 0.0 < self.damping < 1.0:
            raise ValueError(f"damping must lie in (0, 1), got {self.damping}")


@dataclass(frozen=True)
class SentenceGraph:
    sentences: tuple[Sentence, ...]
    idf: dict[str, float]
    sim: np.ndarray
    centrality: np.ndarray | None = None


def term_bag(sentence: Sentence) -> Counter:
    """Non-stopword stems of a sentence; punctuation and symbol-only tokens are ignored."""
    return Counter(
        t.stem for t in sentence.tokens if not t.is_stopword and any(ch.isalnum() for ch in t.surface)
    )


def sentence_idf(bags: list[Counter]) -> dict[str, float]:
    n = len(bags)
    df = Counter(w for bag in bags for w in bag)
    return {w: math.log((n + 1) / (c + 1)) + 1.0 for w, c in df.items()}


def idf_modified_cosine(bags: list[Counter], idf: dict[str, float]) -> np.ndarray:
    """Cosine of tf*idf vectors; the diagonal is 1 and empty bags are 0 elsewhere."""
    n = len(bags)
    vocab = {w: k for k, w in enumerate(idf)}
    w = np.zeros((n, len(vocab)))
    for i, bag in enumerate(bags):
        for term, tf in bag.items():
            w[i, vocab[term]] = tf * idf[term]
    norms = np.linalg.norm(w, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    unit = w / safe[:, None]
    sim = np.minimum(unit @ unit.T, 1.0)
    np.fill_diagonal(sim, 1.0)
    return sim


def build_graph(sentences) -> SentenceGraph:
    sentences = tuple(sentences)
    if not sentences:
        raise ValueError("build_graph needs at least one sentence")
    bags = [term_bag(s) for s in sentences]
    idf = sentence_idf(bags)
    return SentenceGraph(sentences, idf, idf_modified_cosine(bags, idf))


def transition_matrix(sim: np.ndarray, threshold: float | None = None) -> np.ndarray:
    """Row-stochastic matrix from similarities; thresholding switches to 0/1 edges."""
    weights = sim if threshold is None else (sim >= threshold).astype(float)
    n = weights.shape[0]
    sums = weights.sum(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        m = np.where(sums > 0, weights / sums, 1.0 / n)
    return m


def power_iteration(m: np.ndarray, damping: float, epsilon: float, max_iterations: int):
    """Iterate ``p <- d/N + (1-d) M^T p`` from uniform p.

    ``damping`` is the random-jump weight d. Returns ``(p, iterations, converged)``.
    """
    n = m.shape[0]
    p = np.full(n, 1.0 / n)
    mt = m.T
    for it in range(1, max_iterations + 1):
        nxt = damping / n + (1.0 - damping) * (mt @ p)
        delta = np.abs(nxt - p).sum()
        p = nxt
        if delta < epsilon:
            return p / p.sum(), it, True
    return p / p.sum(), max_iterations, False


def centrality(g: SentenceGraph, b: SelectionBudget = SelectionBudget()) -> np.ndarray:
    m = transition_matrix(g.sim, b.threshold)
    p, _, _ = power_iteration(m, b.damping, b.epsilon, b.max_iterations)
    return p


def rank(g: SentenceGraph, b: SelectionBudget = SelectionBudget()) -> SentenceGraph:
    return replace(g, centrality=centrality(g, b))


def select(g: SentenceGraph, b: SelectionBudget = SelectionBudget()) -> list[Sentence]:
    """Greedy budgeted pick by (centrality desc, index asc), returned in document order."""
    scores = g.centrality if g.centrality is not None else centrality(g, b)
    # rounding makes duplicate sentences true ties, so the index decides
    order = sorted(range(len(g.sentences)), key=lambda i: (-round(float(scores[i]), 12), i))
    picked: list[int] = []
    used = 0
    for i in order:
        if len(picked) >= b.max_sentences:
            break
        cost = g.sentences[i].n_whitespace_tokens
        if used + cost <= b.max_tokens or not picked:
            picked.append(i)
            used += cost
    return [g.sentences[i] for i in sorted(picked)]


def extract(text: str, b: SelectionBudget = SelectionBudget()) -> list[Sentence]:
    """Segment, rank and select; empty text gives an empty selection."""
    sentences = segment_sentences(text)
    if not sentences:
        return []
    return select(rank(build_graph(sentences), b), b)
