"""Command line entry point: ``hybridsum <subcommand>``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields
from pathlib import Path

from hybridsum.config import ConfigError, RunConfig, load_config
from hybridsum.corpus import SPLITS, EmptyCorpusError, corpus_stats, filter_corpus, load_corpus, write_jsonl

log = logging.getLogger("hybridsum")


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value run config file")
    g = p.add_argument_group("run config overrides")
    for f in fields(RunConfig):
        flag = "--" + f.name.replace("_", "-")
        ann = str(f.type)
        if ann == "bool":
            g.add_argument(flag, dest=f.name, action=argparse.BooleanOptionalAction, default=None)
        elif ann.startswith("tuple"):
            g.add_argument(flag, dest=f.name, default=None, help="comma separated",
                           type=lambda s: tuple(x.strip() for x in s.split(",") if x.strip()))
        else:
            typ = int if ann.startswith("int") else float if ann.startswith("float") else str
            g.add_argument(flag, dest=f.name, type=typ, default=None)


def config_from_args(args) -> RunConfig:
    base = load_config(args.config) if args.config else RunConfig()
    overrides = {f.name: getattr(args, f.name, None) for f in fields(RunConfig)}
    cfg = base.with_overrides(**overrides)
    if not cfg.corpus_path:
        raise ConfigError("no corpus given (--corpus-path or corpus_path in --config)")
    return cfg


def cmd_ingest(args) -> int:
    cfg = config_from_args(args)
    corpus = load_corpus(cfg.corpus_path, cfg.corpus_format)
    kept = filter_corpus(corpus, cfg.min_doc_tokens, cfg.min_ref_tokens)
    write_jsonl(kept, args.out)
    print(f"loaded {len(corpus)} samples ({corpus.skipped} malformed skipped), kept {len(kept)} -> {args.out}")
    return 0


def _stats_rows(stats):
    from hybridsum.report import fmt

    rows = []
    for split in SPLITS:
        s = stats[split]
        rows.append([split, str(s.sample_count), fmt(s.mean_document_tokens), fmt(s.mean_reference_tokens)])
    return rows


def cmd_stats(args) -> int:
    from hybridsum.report import text_table

    cfg = config_from_args(args)
    corpus = load_corpus(cfg.corpus_path, cfg.corpus_format)
    head = ["split", "samples", "mean doc tokens", "mean summary tokens"]
    print(f"pre-filter: {len(corpus)} samples ({corpus.skipped} malformed skipped)")
    if args.raw:
        print(text_table(head, _stats_rows(corpus_stats(corpus))))
    kept = filter_corpus(corpus, cfg.min_doc_tokens, cfg.min_ref_tokens)
    print(f"post-filter (doc >= {cfg.min_doc_tokens}, summary >= {cfg.min_ref_tokens} tokens): {len(kept)} samples")
    print(text_table(head, _stats_rows(corpus_stats(kept))))
    return 0


def cmd_extract(args) -> int:
    from hybridsum.pipeline import backend_input, prepare_corpus

    cfg = config_from_args(args)
    corpus = prepare_corpus(cfg)
    with open(args.out, "w", encoding="utf-8") as fh:
        for s in corpus:
            fh.write(json.dumps({"id": s.id, "selection": backend_input(s, cfg)}, ensure_ascii=False, sort_keys=True) + "\n")
    print(f"wrote {len(corpus)} selections -> {args.out}")
    return 0


def cmd_summarize(args) -> int:
    from hybridsum.pipeline import build_registry, prepare_corpus, summarize_corpus
    from hybridsum.report import write_predictions

    cfg = config_from_args(args)
    reg = build_registry(cfg)
    corpus = prepare_corpus(cfg)
    preds = summarize_corpus(corpus, cfg, reg)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_predictions(preds, out, cfg.backend)
    failed = sum(isinstance(v, Exception) for v in preds.values())
    print(f"summarized {len(preds)} samples with {cfg.backend} ({failed} failed) -> {out / 'predictions.jsonl'}")
    return 0


def cmd_evaluate(args) -> int:
    from hybridsum.factuality import explain
    from hybridsum.pipeline import evaluate_predictions, prepare_corpus
    from hybridsum.report import load_predictions, render_explain, render_report, write_report
    from hybridsum.textproc import clean_text

    cfg = config_from_args(args)
    corpus = prepare_corpus(cfg)
    preds_path = args.predictions or str(Path(cfg.output_dir) / "predictions.jsonl")
    preds = load_predictions(preds_path)
    if args.explain:
        sample = corpus.by_id().get(args.explain)
        if sample is None or preds.get(args.explain) is None:
            print(f"no sample/prediction with id {args.explain!r}", file=sys.stderr)
            return 2
        hyp = clean_text(preds[args.explain])
        print(render_explain(sample.id, hyp, explain(sample.document, sample.reference, hyp)), end="")
        return 0
    report = evaluate_predictions(corpus, preds, cfg)
    write_report(report, None, cfg)
    print(render_report(report), end="")
    return 0


def cmd_run(args) -> int:
    from hybridsum.pipeline import run_pipeline
    from hybridsum.report import render_report

    cfg = config_from_args(args)
    report = run_pipeline(cfg)
    print(render_report(report), end="")
    print(f"outputs in {cfg.output_dir}")
    return 0


def cmd_compare(args) -> int:
    from hybridsum.pipeline import compare_runs, report_from_files
    from hybridsum.report import render_comparison

    a, b = report_from_files(args.run_a), report_from_files(args.run_b)
    print(render_comparison(compare_runs(a, b)), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hybridsum", description="LexRank + abstractive summarization pipeline and evaluation")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load, clean and filter a corpus into JSONL")
    _add_config_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("stats", help="per-split sample counts and mean whitespace-token lengths")
    _add_config_flags(p)
    p.add_argument("--raw", action="store_true", help="also print pre-filter statistics")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("extract", help="LexRank selection per sample")
    _add_config_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("summarize", help="run the configured backend, write predictions.jsonl")
    _add_config_flags(p)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("evaluate", help="score predictions against the corpus")
    _add_config_flags(p)
    p.add_argument("--predictions", help="predictions.jsonl (default: <output_dir>/predictions.jsonl)")
    p.add_argument("--explain", metavar="ID", help="print per-entity match decisions for one sample")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("run", help="full pipeline: ingest, extract, summarize, evaluate, report")
    _add_config_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="compare two run output directories")
    p.add_argument("run_a")
    p.add_argument("run_b")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, EmptyCorpusError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
