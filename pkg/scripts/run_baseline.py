"""Run the pure-extractive baseline and write its aggregate CSV.

    python scripts/run_baseline.py tests/fixtures/fixture_corpus.jsonl \
        --split test --out tests/fixtures/baseline_lexrank_test.csv

Re-running on the same corpus must reproduce the CSV byte for byte; the
test suite pins the fixture-corpus result this way.
"""

import argparse
import tempfile
from pathlib import Path

from hybridsum.config import RunConfig
from hybridsum.pipeline import run_pipeline
from hybridsum.report import aggregate_csv


def baseline_csv(corpus: str, split: str | None, corpus_format: str = "jsonl") -> str:
    with tempfile.TemporaryDirectory() as tmp:
        cfg = RunConfig(corpus_path=corpus, corpus_format=corpus_format, split=split, backend="lexrank", output_dir=tmp)
        return aggregate_csv(run_pipeline(cfg, write=False))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("corpus")
    ap.add_argument("--format", default="jsonl", choices=["jsonl", "directory"])
    ap.add_argument("--split", default="test")
    ap.add_argument("--out", required=True)
    args = ap.parse_args()
    text = baseline_csv(args.corpus, args.split or None, args.format)
    Path(args.out).write_text(text, encoding="utf-8")
    print(text, end="")


if __name__ == "__main__":
    main()
