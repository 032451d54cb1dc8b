"""End-to-end orchestration: corpus -> extract -> summarize -> evaluate -> report."""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from functools import partial
from pathlib import Path

from hybridsum import __version__
from hybridsum.backend import BackendRegistry, RemoteClient, RemoteEmbeddingProvider, SummarizeRequest, TransportError, default_registry, truncate_tokens
from hybridsum.config import ConfigError, RunConfig
from hybridsum.corpus import Corpus, Sample, filter_corpus, load_corpus
from hybridsum.entities import extract_entities
from hybridsum.factuality import FACTUALITY_FIELDS, MatchCounts, match_counts, micro_average, scores_from_counts
from hybridsum.lexrank import extract
from hybridsum.overlap_metrics import (
    EmbeddingProvider,
    FixtureEmbeddingProvider,
    HashingEmbeddingProvider,
    ProviderError,
    embed_score,
    meteor,
    rouge_l,
    rouge_n,
)
from hybridsum.textproc import clean_text, content_tokens

log = logging.getLogger(__name__)

OUTPUT_FILES = ("predictions.jsonl", "per_sample.jsonl", "aggregate.csv", "report.txt")
OVERLAP_COLUMNS = ("ROUGE-1", "ROUGE-2", "ROUGE-L")


# embedding providers

def parse_embed_spec(spec: str) -> tuple[str, str]:
    """``label=kind[:args]`` or bare ``kind[:args]`` -> (column label, provider spec)."""
    if "=" in spec:
        label, body = (x.strip() for x in spec.split("=", 1))
        return label, body
    return f"BERTScore[{spec}]", spec


def make_provider(spec: str, cfg: RunConfig, client: RemoteClient | None = None) -> EmbeddingProvider:
    kind, _, arg = spec.partition(":")
    if kind == "hashing":
        return HashingEmbeddingProvider(int(arg) if arg else 64)
    if kind == "fixture":
        if not arg:
            raise ConfigError("fixture provider needs a path: fixture:<file>")
        return FixtureEmbeddingProvider.from_file(arg, provider_id=spec)
    if kind == "remote":
        name, _, dim = arg.partition(":")
        if not name or not dim:
            raise ConfigError("remote provider spec is remote:<provider>:<dimension>")
        if client is None:
            if not cfg.remote_endpoint:
                raise ConfigError("remote embedding provider needs remote_endpoint")
            client = RemoteClient(cfg.remote_endpoint)
        return RemoteEmbeddingProvider(client, name, int(dim))
    raise ConfigError(f"unknown embedding provider {spec!r}")


def metric_columns(cfg: RunConfig) -> list[str]:
    """Headline columns of a report; a function of the config only."""
    cols: list[str] = []
    if cfg.rouge:
        cols += OVERLAP_COLUMNS
    if cfg.meteor:
        cols.append("METEOR")
    cols += [parse_embed_spec(s)[0] for s in cfg.embed]
    if cfg.factuality:
        cols += FACTUALITY_FIELDS
    return cols


# report model

@dataclass
class SampleRow:
    id: str
    metrics: dict[str, float | None]
    detail: dict[str, float | None] = field(default_factory=dict)
    counts: dict[str, int] | None = None
    error: str | None = None

    def to_json(self) -> dict:
        return {"id": self.id, "error": self.error, "metrics": self.metrics, "detail": self.detail, "counts": self.counts}


@dataclass
class EvalReport:
    system: str
    columns: list[str]
    rows: list[SampleRow]
    aggregate: dict[str, float | None]
    present: dict[str, int]
    metadata: dict

    @property
    def ids(self) -> list[str]:
        return [r.id for r in self.rows]


def aggregate_rows(rows: list[SampleRow], columns: list[str], mode: str = "macro"):
    """Mean x100 of present values per column; absent values are excluded, never zero."""
    agg: dict[str, float | None] = {}
    present: dict[str, int] = {}
    for col in columns:
        vals = [r.metrics[col] for r in rows if r.metrics.get(col) is not None]
        present[col] = len(vals)
        agg[col] = 100.0 * sum(vals) / len(vals) if vals else None
    if mode == "micro":
        counted = [MatchCounts(**r.counts) for r in rows if r.counts is not None]
        if counted:
            pooled = micro_average(counted).as_dict()
            for col in FACTUALITY_FIELDS:
                if col in agg:
                    agg[col] = 100.0 * pooled[col]
    return agg, present


# evaluation

def evaluate_sample(
    sample_id: str,
    source: str,
    reference: str,
    hypothesis: str,
    cfg: RunConfig,
    providers: dict[str, EmbeddingProvider],
) -> SampleRow:
    hyp_tok = content_tokens(clean_text(hypothesis))
    ref_tok = content_tokens(clean_text(reference))
    metrics: dict[str, float | None] = {}
    detail: dict[str, float | None] = {}
    counts = None
    if cfg.rouge:
        for col, score in (
            ("ROUGE-1", rouge_n(hyp_tok, ref_tok, 1, cfg.rouge_stem)),
            ("ROUGE-2", rouge_n(hyp_tok, ref_tok, 2, cfg.rouge_stem)),
            ("ROUGE-L", rouge_l(hyp_tok, ref_tok, cfg.rouge_stem)),
        ):
            metrics[col] = score.f1
            detail[col + ".p"], detail[col + ".r"] = score.precision, score.recall
    if cfg.meteor:
        metrics["METEOR"] = meteor(hyp_tok, ref_tok)
    for label, provider in providers.items():
        try:
            p, r, f = embed_score(hyp_tok, ref_tok, provider)
        except ProviderError as exc:
            log.warning("sample %s: provider %s failed: %s", sample_id, label, exc)
            metrics[label] = detail[label + ".p"] = detail[label + ".r"] = None
            continue
        metrics[label] = f
        detail[label + ".p"], detail[label + ".r"] = p, r
    if cfg.factuality:
        kinds = cfg.entity_kinds
        extractor = extract_entities if kinds is None else partial(extract_entities, kinds=frozenset(kinds))
        c = match_counts(source, reference, hypothesis, extractor)
        metrics.update(scores_from_counts(c).as_dict())
        counts = asdict(c)
    return SampleRow(sample_id, metrics, detail, counts)


def absent_row(sample_id: str, columns: list[str], error: str) -> SampleRow:
    return SampleRow(sample_id, {c: None for c in columns}, {}, None, error)


# stages

def prepare_corpus(cfg: RunConfig) -> Corpus:
    corpus = load_corpus(cfg.corpus_path, cfg.corpus_format)
    if cfg.split:
        corpus = corpus.split(cfg.split)
    before = len(corpus)
    corpus = filter_corpus(corpus, cfg.min_doc_tokens, cfg.min_ref_tokens)
    log.info("corpus %s: %d samples before filter, %d after", cfg.corpus_path, before, len(corpus))
    return corpus


def backend_input(sample: Sample, cfg: RunConfig) -> str:
    """LexRank selection (one sentence per line) or the truncated raw document."""
    if cfg.extract:
        return "\n".join(s.text for s in extract(sample.document, cfg.budget))
    return truncate_tokens(sample.document, cfg.max_input_tokens + 1)


def build_registry(cfg: RunConfig, registry: BackendRegistry | None = None) -> BackendRegistry:
    reg = registry or default_registry(cfg.budget)
    if cfg.backend not in reg:
        if cfg.remote_endpoint:
            reg.register(cfg.backend, "remote", endpoint=cfg.remote_endpoint)
        else:
            raise ConfigError(f"backend {cfg.backend!r} is not registered and no remote_endpoint is set")
    reg.frozen = True
    return reg


def summarize_corpus(corpus: Corpus, cfg: RunConfig, registry: BackendRegistry) -> dict[str, str | Exception]:
    def one(sample: Sample):
        try:
            req = SummarizeRequest(sample.id, backend_input(sample, cfg), cfg.backend, cfg.max_output_tokens)
            return registry.summarize(req).summary
        except (TransportError, ValueError) as exc:
            log.warning("sample %s: summarize failed: %s", sample.id, exc)
            return exc

    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        results = list(pool.map(one, corpus.samples))
    return {s.id: r for s, r in zip(corpus.samples, results)}


def evaluate_predictions(
    corpus: Corpus,
    predictions: dict[str, str | Exception | None],
    cfg: RunConfig,
    providers: dict[str, EmbeddingProvider] | None = None,
) -> EvalReport:
    columns = metric_columns(cfg)
    if providers is None:
        providers = {label: make_provider(spec, cfg) for label, spec in map(parse_embed_spec, cfg.embed)}
    samples = sorted(corpus.samples, key=lambda s: s.id)

    def one(sample: Sample) -> SampleRow:
        hyp = predictions.get(sample.id)
        if hyp is None:
            return absent_row(sample.id, columns, "no prediction")
        if isinstance(hyp, Exception):
            return absent_row(sample.id, columns, f"{type(hyp).__name__}: {hyp}")
        return evaluate_sample(sample.id, sample.document, sample.reference, hyp, cfg, providers)

    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        rows = list(pool.map(one, samples))
    agg, present = aggregate_rows(rows, columns, cfg.aggregation)
    meta = {
        "version": __version__,
        "config_hash": cfg.config_hash(),
        "backend": cfg.backend,
        "aggregation": cfg.aggregation,
        "n_samples": len(rows),
        "n_failed": sum(r.error is not None for r in rows),
    }
    return EvalReport(cfg.backend, columns, rows, agg, present, meta)


def run_pipeline(cfg: RunConfig, registry: BackendRegistry | None = None, write: bool = True) -> EvalReport:
    from hybridsum.report import write_report

    started = datetime.now(timezone.utc).isoformat()
    t0 = time.perf_counter()
    reg = build_registry(cfg, registry)
    providers = {label: make_provider(spec, cfg) for label, spec in map(parse_embed_spec, cfg.embed)}
    corpus = prepare_corpus(cfg)
    predictions = summarize_corpus(corpus, cfg, reg)
    report = evaluate_predictions(corpus, predictions, cfg, providers)
    report.metadata["started_at"] = started
    report.metadata["finished_at"] = datetime.now(timezone.utc).isoformat()
    report.metadata["elapsed_s"] = round(time.perf_counter() - t0, 3)
    if write:
        write_report(report, predictions, cfg)
    return report


# comparison

@dataclass
class Comparison:
    system_a: str
    system_b: str
    rows: list[dict]


def compare_runs(a: EvalReport, b: EvalReport) -> Comparison:
    """Per-metric deltas (b - a) over the shared columns; higher is better everywhere."""
    if sorted(a.ids) != sorted(b.ids):
        missing = set(a.ids) ^ set(b.ids)
        raise ValueError(f"reports cover different samples ({len(missing)} ids differ)")
    rows = []
    for col in [c for c in a.columns if c in b.columns]:
        va, vb = a.aggregate.get(col), b.aggregate.get(col)
        if va is None or vb is None:
            rows.append({"metric": col, "a": va, "b": vb, "delta": None, "better": None})
            continue
        better = "a" if va > vb else "b" if vb > va else "tie"
        rows.append({"metric": col, "a": va, "b": vb, "delta": vb - va, "better": better})
    return Comparison(a.system, b.system, rows)


def report_from_files(out_dir) -> EvalReport:
    """Rebuild an EvalReport from ``per_sample.jsonl`` and ``run_meta.json``."""
    out_dir = Path(out_dir)
    meta = json.loads((out_dir / "run_meta.json").read_text("utf-8"))
    rows = []
    with (out_dir / "per_sample.jsonl").open(encoding="utf-8") as fh:
        for line in fh:
            rec = json.loads(line)
            rows.append(SampleRow(rec["id"], rec["metrics"], rec.get("detail") or {}, rec.get("counts"), rec.get("error")))
    columns = meta["columns"]
    agg, present = aggregate_rows(rows, columns, meta.get("aggregation", "macro"))
    return EvalReport(meta["backend"], columns, rows, agg, present, meta)
