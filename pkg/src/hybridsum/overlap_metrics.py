"""ROUGE-N/L, METEOR (exact + stem stages) and greedy embedding matching."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from hybridsum.textproc import ngrams


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float


def _prf(overlap: int, n_hyp: int, n_ref: int) -> RougeScore:
    p = overlap / n_hyp if n_hyp else 0.0
    r = overlap / n_ref if n_ref else 0.0
    return RougeScore(p, r, 0.0 if p + r == 0 else 2 * p * r / (p + r))


def rouge_n(hyp_tokens, ref_tokens, n: int = 1, use_stems: bool = True) -> RougeScore:
    hyp = ngrams(hyp_tokens, n, use_stems)
    ref = ngrams(ref_tokens, n, use_stems)
    overlap = sum((hyp & ref).values())
    return _prf(overlap, sum(hyp.values()), sum(ref.values()))


def lcs_length(a, b) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def rouge_l(hyp_tokens, ref_tokens, use_stems: bool = True) -> RougeScore:
    key = (lambda t: t.stem) if use_stems else (lambda t: t.lower)
    hyp = [key(t) for t in hyp_tokens]
    ref = [key(t) for t in ref_tokens]
    return _prf(lcs_length(hyp, ref), len(hyp), len(ref))


# METEOR

def count_chunks(alignment: dict[int, int]) -> int:
    """Runs of hypothesis-adjacent matches that are also reference-adjacent."""
    chunks = 0
    prev = None
    for i in sorted(alignment):
        j = alignment[i]
        if prev is None or i != prev[0] + 1 or j != prev[1] + 1:
            chunks += 1
        prev = (i, j)
    return chunks


def _tile(hyp_keys, ref_keys, fixed: dict[int, int]) -> dict[int, int]:
    """Greedy string tiling: repeatedly align the longest run of equal free keys."""
    align = dict(fixed)
    free_h = [i not in fixed for i in range(len(hyp_keys))]
    used = set(fixed.values())
    free_r = [j not in used for j in range(len(ref_keys))]
    while True:
        best_len, best_end = 0, None
        prev = [0] * (len(ref_keys) + 1)
        for i, hk in enumerate(hyp_keys):
            cur = [0] * (len(ref_keys) + 1)
            if free_h[i]:
                for j, rk in enumerate(ref_keys):
                    if free_r[j] and hk == rk:
                        cur[j + 1] = prev[j] + 1
                        if cur[j + 1] > best_len:
                            best_len, best_end = cur[j + 1], (i, j)
            prev = cur
        if not best_len:
            return align
        i_end, j_end = best_end
        for d in range(best_len):
            i, j = i_end - d, j_end - d
            align[i] = j
            free_h[i] = free_r[j] = False


def _stage_align(hyp_keys, ref_keys, fixed: dict[int, int], node_budget: int = 2000) -> dict[int, int]:
    """Extend ``fixed`` with a maximum set of key-equal matches, fewest chunks overall.

    Each key shared by the still-free tokens contributes min(#hyp, #ref)
    matches; which occurrences pair up is a depth-first search seeded with
    greedy string tiling. Past ``node_budget`` nodes the best alignment found
    so far is kept.
    """
    used_ref = set(fixed.values())
    free_r: dict[str, list[int]] = {}
    for j, k in enumerate(ref_keys):
        if j not in used_ref:
            free_r.setdefault(k, []).append(j)
    cands = [i for i in range(len(hyp_keys)) if i not in fixed and hyp_keys[i] in free_r]
    n_cands: dict[str, int] = {}
    for i in cands:
        n_cands[hyp_keys[i]] = n_cands.get(hyp_keys[i], 0) + 1
    quota = {k: min(c, len(free_r[k])) for k, c in n_cands.items()}
    if not cands:
        return dict(fixed)

    def options(i, align, taken):
        opts = [j for j in free_r[hyp_keys[i]] if j not in taken]
        prev = align.get(i - 1)
        if prev is not None and prev + 1 in opts:
            opts.remove(prev + 1)
            opts.insert(0, prev + 1)
        return opts

    best = _tile(hyp_keys, ref_keys, fixed)
    best_chunks = count_chunks(best)
    nodes = 0

    def dfs(pos, align, taken, left, later):
        nonlocal best, best_chunks, nodes
        nodes += 1
        if nodes > node_budget or best_chunks == 1:
            return
        if pos == len(cands):
            c = count_chunks(align)
            if c < best_chunks:
                best, best_chunks = dict(align), c
            return
        i = cands[pos]
        # chunks wholly before i can no longer merge, so they bound the result
        if count_chunks({h: r for h, r in align.items() if h < i}) >= best_chunks:
            return
        k = hyp_keys[i]
        later[k] -= 1
        if left[k]:
            for j in options(i, align, taken):
                align[i] = j
                taken.add(j)
                left[k] -= 1
                dfs(pos + 1, align, taken, left, later)
                left[k] += 1
                taken.discard(j)
                del align[i]
        if later[k] >= left[k]:
            dfs(pos + 1, align, taken, left, later)
        later[k] += 1

    dfs(0, dict(fixed), set(), dict(quota), dict(n_cands))
    return best


@dataclass(frozen=True)
class MeteorDetail:
    score: float
    matches: int
    chunks: int
    precision: float
    recall: float
    fmean: float
    penalty: float


def meteor_detail(hyp_tokens, ref_tokens, alpha: float = 0.9, beta: float = 3.0, gamma: float = 0.5) -> MeteorDetail:
    align: dict[int, int] = {}
    for attr in ("lower", "stem"):
        align = _stage_align([getattr(t, attr) for t in hyp_tokens], [getattr(t, attr) for t in ref_tokens], align)
    m = len(align)
    if m == 0:
        return MeteorDetail(0.0, 0, 0, 0.0, 0.0, 0.0, 0.0)
    p = m / len(hyp_tokens)
    r = m / len(ref_tokens)
    fmean = p * r / (alpha * p + (1 - alpha) * r)
    chunks = count_chunks(align)
    penalty = gamma * (chunks / m) ** beta
    return MeteorDetail(fmean * (1 - penalty), m, chunks, p, r, fmean, penalty)


def meteor(hyp_tokens, ref_tokens) -> float:
    """METEOR with Fmean = 10PR/(R+9P) and penalty 0.5*(chunks/m)^3."""
    return meteor_detail(hyp_tokens, ref_tokens).score


# Embedding-based greedy matching

class ProviderError(RuntimeError):
    pass


class EmbeddingProvider:
    provider_id = "base"
    dimension = 0

    def embed(self, tokens: list[str]) -> np.ndarray:
        raise NotImplementedError


class FixtureEmbeddingProvider(EmbeddingProvider):
    """Token -> vector table. File format: one token per line, then ``dimension`` reals."""

    def __init__(self, table: dict[str, np.ndarray], provider_id: str = "fixture", oov_zero: bool = False):
        dims = {len(v) for v in table.values()}
        if len(dims) != 1:
            raise ValueError(f"fixture vectors must share one dimension, got {sorted(dims)}")
        self.table = {k: np.asarray(v, dtype=float) for k, v in table.items()}
        self.dimension = dims.pop()
        self.provider_id = provider_id
        self.oov_zero = oov_zero

    @classmethod
    def from_file(cls, path, provider_id: str = "fixture", oov_zero: bool = False):
        table = {}
        for lineno, line in enumerate(Path(path).read_text("utf-8").splitlines(), 1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            try:
                table[parts[0]] = np.array([float(x) for x in parts[1:]])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric vector entry") from None
        return cls(table, provider_id, oov_zero)

    def embed(self, tokens):
        rows = []
        for tok in tokens:
            vec = self.table.get(tok)
            if vec is None:
                if not self.oov_zero:
                    raise ProviderError(f"{self.provider_id}: no vector for token {tok!r}")
                vec = np.zeros(self.dimension)
            rows.append(vec)
        return np.array(rows).reshape(len(rows), self.dimension)


class HashingEmbeddingProvider(EmbeddingProvider):
    """Deterministic non-negative pseudo-embeddings keyed on the token string.

    Carries no semantics; it only exercises the aggregation end to end
    without model weights.
    """

    def __init__(self, dimension: int = 64, provider_id: str = "hashing"):
        self.dimension = dimension
        self.provider_id = provider_id

    def _vector(self, tok: str) -> np.ndarray:
        seed = int.from_bytes(hashlib.sha256(tok.encode("utf-8")).digest()[:8], "little")
        return np.random.default_rng(seed).random(self.dimension)

    def embed(self, tokens):
        return np.array([self._vector(t) for t in tokens]).reshape(len(tokens), self.dimension)


def cosine_table(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    na = np.linalg.norm(a, axis=1, keepdims=True)
    nb = np.linalg.norm(b, axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        sims = (a @ b.T) / (na * nb.T)
    return np.nan_to_num(sims, nan=0.0, posinf=0.0, neginf=0.0)


def embed_score(hyp_tokens, ref_tokens, provider: EmbeddingProvider) -> tuple[float, float, float]:
    """Greedy max-cosine matching in both directions, returns (P, R, F1).

    Negative best-match cosines count as 0 so every score stays in [0, 1].
    """
    if not hyp_tokens or not ref_tokens:
        return 0.0, 0.0, 0.0
    h = provider.embed([t.lower for t in hyp_tokens])
    r = provider.embed([t.lower for t in ref_tokens])
    sims = cosine_table(h, r)
    p = float(np.clip(sims.max(axis=1), 0.0, 1.0).mean())
    rec = float(np.clip(sims.max(axis=0), 0.0, 1.0).mean())
    f = 0.0 if p + rec == 0 else 2 * p * rec / (p + rec)
    return p, rec, f
