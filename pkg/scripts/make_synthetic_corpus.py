"""Write a seeded synthetic earnings-call corpus in the JSONL interchange format.

Useful for timing the pipeline at realistic sizes without the real dataset:

    python scripts/make_synthetic_corpus.py --n 500 --doc-sentences 150 --out /tmp/synth.jsonl
"""

import argparse
import json

import numpy as np

COMPANIES = ["Acme Industrial", "Globex", "Initech", "Umbrella Chemicals", "Stark Refining", "Wayne Logistics"]
TEMPLATES = [
    "{co} reported {q} revenue of ${a} million, up {p}% from a year ago.",
    "Adjusted earnings per share were ${e} in the {q}.",
    "Operating margin was {p}% and free cash flow reached ${a} million.",
    "We expect fiscal {y} revenue of ${b} billion.",
    "Demand in our core markets remained resilient through the quarter.",
    "Pricing actions offset most of the cost inflation we saw.",
    "{name} will now walk through the segment results.",
    "We returned ${a} million to shareholders through dividends and buybacks.",
]
NAMES = ["Jane Ortiz", "Mark Lashier", "Priya Raman", "Tom Becker"]
QUARTERS = ["first quarter", "second quarter", "third quarter", "fourth quarter"]


def sample(rng, i, n_sents):
    co = str(rng.choice(COMPANIES))
    q = int(rng.integers(0, 4))
    y = int(rng.integers(2019, 2024))

    def fill(t):
        return t.format(
            co=co, q=QUARTERS[q], a=int(rng.integers(10, 999)), b=round(float(rng.uniform(1, 9)), 2),
            e=round(float(rng.uniform(0.1, 6)), 2), p=round(float(rng.uniform(1, 40)), 1), y=y,
            name=str(rng.choice(NAMES)),
        )

    doc = " ".join(fill(str(rng.choice(TEMPLATES))) for _ in range(n_sents))
    summary = "\n".join(
        [f"{co.lower()} q{q + 1} adjusted earnings per share ${round(float(rng.uniform(0.1, 6)), 2)}.",
         f"q{q + 1} revenue ${int(rng.integers(10, 999))} million."]
    )
    split = str(rng.choice(["train", "validation", "test"], p=[0.69, 0.1, 0.21]))
    return {"id": f"synth-{i:05d}", "split": split, "document": doc, "summary": summary}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--doc-sentences", type=int, default=120)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    with open(args.out, "w", encoding="utf-8") as fh:
        for i in range(args.n):
            fh.write(json.dumps(sample(rng, i, args.doc_sentences)) + "\n")
    print(f"wrote {args.n} samples -> {args.out}")


if __name__ == "__main__":
    main()
