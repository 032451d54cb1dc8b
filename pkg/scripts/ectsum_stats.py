"""Per-split sample counts and mean token lengths of an ECTSum checkout, with timing.

    python scripts/ectsum_stats.py /data/ECTSum/data/final
"""

import argparse
import time
from pathlib import Path

from hybridsum.corpus import SPLITS, corpus_stats, filter_corpus, load_corpus

PUBLISHED = {"train": (1681, 2860, 44), "validation": (249, 2769, 42), "test": (495, 2818, 43)}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("path", help="directory tree or JSONL file")
    args = ap.parse_args()
    t0 = time.perf_counter()
    fmt = "directory" if Path(args.path).is_dir() else "jsonl"
    raw = load_corpus(args.path, fmt)
    kept = filter_corpus(raw)
    stats = corpus_stats(kept)
    print(f"loaded {len(raw)} ({raw.skipped} skipped), kept {len(kept)} in {time.perf_counter() - t0:.1f}s")
    for split in SPLITS:
        s = stats[split]
        n, d, r = PUBLISHED[split]
        if s.sample_count == 0:
            print(f"{split:<10} 0 samples")
            continue
        print(
            f"{split:<10} {s.sample_count:>5} (published {n})  doc {s.mean_document_tokens:8.1f} ({d}, "
            f"{100 * (s.mean_document_tokens / d - 1):+.2f}%)  summary {s.mean_reference_tokens:6.1f} ({r}, "
            f"{100 * (s.mean_reference_tokens / r - 1):+.2f}%)"
        )


if __name__ == "__main__":
    main()
