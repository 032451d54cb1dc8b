"""Entity-level factual consistency: source precision and target P/R/F1.

Two variants of every score. ``set`` (U) tests each distinct normalized
entity once; ``list`` (NU) tests every occurrence independently against the
other side's text and entity set.

Empty-collection conventions:

* source precision with no hypothesis entities is 1.0 (nothing hallucinated);
* target precision with no hypothesis entities is 1.0 if the reference has
  none either, else 0.0;
* target recall with no reference entities is 1.0;
* F1 is 0.0 whenever precision + recall is 0.
"""

from __future__ import annotations

from dataclasses import astuple, dataclass, fields

from hybridsum.entities import EntityList, entity_match, extract_entities, text_words
from hybridsum.textproc import clean_text

VARIANTS = ("set", "list")

CONVENTIONS = (
    "prec_s = 1 when the hypothesis has no entities",
    "prec_t = 1 when hypothesis and reference both have no entities, 0 when only the hypothesis is empty",
    "recall_t = 1 when the reference has no entities",
    "F1 = 0 when P + R = 0",
)


@dataclass(frozen=True)
class FactualityScores:
    prec_s_NU: float
    prec_s_U: float
    prec_t_NU: float
    recall_t_NU: float
    f1_t_NU: float
    prec_t_U: float
    recall_t_U: float
    f1_t_U: float

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


FACTUALITY_FIELDS = tuple(f.name for f in fields(FactualityScores))


@dataclass(frozen=True)
class MatchCounts:
    """Numerators and denominators behind one sample's scores (for micro averaging)."""

    src_hit_NU: int
    hyp_NU: int
    src_hit_U: int
    hyp_U: int
    tgt_hit_NU: int
    ref_hit_NU: int
    ref_NU: int
    tgt_hit_U: int
    ref_hit_U: int
    ref_U: int


def f1(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def _members(ents: EntityList, variant: str):
    if variant == "set":
        return ents.representatives()
    if variant == "list":
        return list(ents.entities)
    raise ValueError(f"unknown variant {variant!r}")


def _hits(ents: EntityList, variant: str, other_text: str, other: EntityList) -> tuple[int, int]:
    members = _members(ents, variant)
    words = text_words(other_text)
    return sum(entity_match(e, other_text, other, words) for e in members), len(members)


def _ratio(hit: int, total: int, empty: float) -> float:
    return empty if total == 0 else hit / total


def precision_source(hyp: EntityList, source_text: str, source: EntityList, variant: str = "set") -> float:
    hit, total = _hits(hyp, variant, source_text, source)
    return _ratio(hit, total, 1.0)


def target_scores(hyp: EntityList, hyp_text: str, ref: EntityList, ref_text: str, variant: str = "set"):
    """Return ``(prec_t, recall_t, f1_t)``.

    Reference entities are matched against the hypothesis text and entity set
    with the same partial-match rule used for source precision.
    """
    hit_h, n_h = _hits(hyp, variant, ref_text, ref)
    hit_r, n_r = _hits(ref, variant, hyp_text, hyp)
    p = _ratio(hit_h, n_h, 1.0 if n_r == 0 else 0.0)
    r = _ratio(hit_r, n_r, 1.0)
    return p, r, f1(p, r)


def match_counts(source_text: str, ref_text: str, hyp_text: str, extractor=extract_entities) -> MatchCounts:
    source_text, ref_text, hyp_text = clean_text(source_text), clean_text(ref_text), clean_text(hyp_text)
    src, ref, hyp = extractor(source_text), extractor(ref_text), extractor(hyp_text)
    s_nu, h_nu = _hits(hyp, "list", source_text, src)
    s_u, h_u = _hits(hyp, "set", source_text, src)
    t_nu, _ = _hits(hyp, "list", ref_text, ref)
    r_nu, n_nu = _hits(ref, "list", hyp_text, hyp)
    t_u, _ = _hits(hyp, "set", ref_text, ref)
    r_u, n_u = _hits(ref, "set", hyp_text, hyp)
    return MatchCounts(s_nu, h_nu, s_u, h_u, t_nu, r_nu, n_nu, t_u, r_u, n_u)


def scores_from_counts(c: MatchCounts) -> FactualityScores:
    p_nu = _ratio(c.tgt_hit_NU, c.hyp_NU, 1.0 if c.ref_NU == 0 else 0.0)
    r_nu = _ratio(c.ref_hit_NU, c.ref_NU, 1.0)
    p_u = _ratio(c.tgt_hit_U, c.hyp_U, 1.0 if c.ref_U == 0 else 0.0)
    r_u = _ratio(c.ref_hit_U, c.ref_U, 1.0)
    return FactualityScores(
        prec_s_NU=_ratio(c.src_hit_NU, c.hyp_NU, 1.0),
        prec_s_U=_ratio(c.src_hit_U, c.hyp_U, 1.0),
        prec_t_NU=p_nu,
        recall_t_NU=r_nu,
        f1_t_NU=f1(p_nu, r_nu),
        prec_t_U=p_u,
        recall_t_U=r_u,
        f1_t_U=f1(p_u, r_u),
    )


def score_sample(source_text: str, ref_text: str, hyp_text: str, extractor=extract_entities) -> FactualityScores:
    """All eight scores for one (source, reference, hypothesis) triple.

    ``extractor`` is any callable mapping text to an EntityList, so a
    model-backed NER can stand in for the pattern extractor.
    """
    return scores_from_counts(match_counts(source_text, ref_text, hyp_text, extractor))


def micro_average(counts) -> FactualityScores:
    """Pool numerators/denominators over samples before dividing."""
    counts = list(counts)
    if not counts:
        raise ValueError("micro_average needs at least one sample")
    pooled = [sum(col) for col in zip(*(astuple(c) for c in counts))]
    return scores_from_counts(MatchCounts(*pooled))


@dataclass(frozen=True)
class EntityDecision:
    entity: object
    side: str  # "hypothesis" or "reference"
    status: str  # matched | supported | hallucinated | missing | found
    in_source: bool
    in_counterpart: bool


def explain(source_text: str, ref_text: str, hyp_text: str, extractor=extract_entities) -> list[EntityDecision]:
    """Per-entity match decisions for one sample, in document order per side.

    Hypothesis entities are ``matched`` (found in the reference),
    ``supported`` (only in the source) or ``hallucinated`` (in neither).
    Reference entities are ``found`` or ``missing`` in the hypothesis.
    """
    source_text, ref_text, hyp_text = clean_text(source_text), clean_text(ref_text), clean_text(hyp_text)
    src, ref, hyp = extractor(source_text), extractor(ref_text), extractor(hyp_text)
    src_w, ref_w, hyp_w = text_words(source_text), text_words(ref_text), text_words(hyp_text)
    out = []
    for e in hyp:
        in_src = entity_match(e, source_text, src, src_w)
        in_ref = entity_match(e, ref_text, ref, ref_w)
        status = "matched" if in_ref else "supported" if in_src else "hallucinated"
        out.append(EntityDecision(e, "hypothesis", status, in_src, in_ref))
    for e in ref:
        in_hyp = entity_match(e, hyp_text, hyp, hyp_w)
        in_src = entity_match(e, source_text, src, src_w)
        out.append(EntityDecision(e, "reference", "found" if in_hyp else "missing", in_src, in_hyp))
    return out
