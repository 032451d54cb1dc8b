"""Corpus ingest, cleaning, filtering and split statistics (ECTSum layout)."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from statistics import fmean

from hybridsum.textproc import clean_text, count_whitespace_tokens

log = logging.getLogger(__name__)

SPLITS = ("train", "validation", "test")
_SPLIT_ALIASES = {"train": "train", "validation": "validation", "val": "validation", "valid": "validation", "dev": "validation", "test": "test"}


class EmptyCorpusError(ValueError):
    pass


@dataclass(frozen=True)
class Sample:
    id: str
    document: str
    reference: str
    split: str

    def cleaned(self) -> "Sample":
        return replace(self, document=clean_text(self.document), reference=clean_text(self.reference))


@dataclass(frozen=True)
class Corpus:
    samples: tuple[Sample, ...]
    provenance: str = ""
    skipped: int = 0

    def __len__(self):
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def split(self, name: str) -> "Corpus":
        return replace(self, samples=tuple(s for s in self.samples if s.split == name))

    def by_id(self) -> dict[str, Sample]:
        return {s.id: s for s in self.samples}


@dataclass(frozen=True)
class SplitStats:
    sample_count: int
    mean_document_tokens: float | None
    mean_reference_tokens: float | None


@dataclass(frozen=True)
class CorpusStats:
    splits: dict[str, SplitStats] = field(default_factory=dict)

    def __getitem__(self, split: str) -> SplitStats:
        return self.splits[split]


def normalize_split(name: str) -> str | None:
    return _SPLIT_ALIASES.get(str(name).strip().lower())


def _record_to_sample(rec) -> Sample | None:
    if not isinstance(rec, dict):
        return None
    sid, doc, summ, split = (rec.get(k) for k in ("id", "document", "summary", "split"))
    if not all(isinstance(v, str) for v in (doc, summ)) or sid is None or split is None:
        return None
    split = normalize_split(split)
    sid = str(sid)
    if split is None or not sid:
        return None
    return Sample(sid, doc, summ, split)


def _load_jsonl(path: Path) -> tuple[list[Sample], int]:
    samples, skipped = [], 0
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                sample = _record_to_sample(json.loads(line))
            except json.JSONDecodeError:
                sample = None
            if sample is None:
                log.warning("%s:%d: malformed record skipped", path, lineno)
                skipped += 1
                continue
            samples.append(sample)
    return samples, skipped


def _pair_files(split_dir: Path):
    """Yield (id, document_path, summary_path | None) for either supported layout."""
    ects, gts = split_dir / "ects", split_dir / "gt_summaries"
    if ects.is_dir():
        for doc in sorted(ects.glob("*.txt")):
            summ = gts / doc.name
            yield doc.stem, doc, summ if summ.is_file() else None
        return
    for doc in sorted(split_dir.glob("*.ect")):
        summ = doc.with_suffix(".summary")
        yield doc.stem, doc, summ if summ.is_file() else None


def _load_tree(root: Path) -> tuple[list[Sample], int]:
    samples, skipped = [], 0
    for child in sorted(p for p in root.iterdir() if p.is_dir()):
        split = normalize_split(child.name)
        if split is None:
            continue
        for sid, doc, summ in _pair_files(child):
            if summ is None:
                log.warning("%s: no paired summary, skipped", doc)
                skipped += 1
                continue
            samples.append(Sample(sid, doc.read_text("utf-8"), summ.read_text("utf-8"), split))
    return samples, skipped


def load_corpus(path, format: str = "jsonl") -> Corpus:
    """Load a corpus; malformed or duplicate records are skipped and counted.

    ``format`` is ``jsonl`` (fields id, document, summary, split) or
    ``directory`` (``<root>/<split>/<id>.ect`` + ``<id>.summary``, or the
    ECTSum release layout ``<root>/<split>/ects/<id>.txt`` +
    ``gt_summaries/<id>.txt``).
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    if format == "jsonl":
        samples, skipped = _load_jsonl(path)
    elif format in ("directory", "directory-tree"):
        samples, skipped = _load_tree(path)
    else:
        raise ValueError(f"unknown corpus format {format!r}")
    seen: set[str] = set()
    unique = []
    for s in samples:
        if s.id in seen:
            log.warning("duplicate id %s skipped", s.id)
            skipped += 1
            continue
        seen.add(s.id)
        unique.append(s)
    if not unique:
        raise EmptyCorpusError(f"no parseable records in {path}")
    return Corpus(tuple(unique), str(path), skipped)


def write_jsonl(c: Corpus, path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for s in c.samples:
            rec = {"id": s.id, "document": s.document, "summary": s.reference, "split": s.split}
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def clean_corpus(c: Corpus) -> Corpus:
    return replace(c, samples=tuple(s.cleaned() for s in c.samples))


def filter_corpus(c: Corpus, min_doc_tokens: int = 20, min_ref_tokens: int = 3) -> Corpus:
    """Clean every sample and keep those meeting both whitespace-token minimums."""
    if min_doc_tokens < 1 or min_ref_tokens < 1:
        raise ValueError("token thresholds must be >= 1")
    kept = tuple(
        s for s in (x.cleaned() for x in c.samples)
        if count_whitespace_tokens(s.document) >= min_doc_tokens
        and count_whitespace_tokens(s.reference) >= min_ref_tokens
    )
    log.info("filter kept %d of %d samples", len(kept), len(c.samples))
    return replace(c, samples=kept)


def corpus_stats(c: Corpus) -> CorpusStats:
    out = {}
    for split in SPLITS:
        docs = [count_whitespace_tokens(clean_text(s.document)) for s in c.samples if s.split == split]
        refs = [count_whitespace_tokens(clean_text(s.reference)) for s in c.samples if s.split == split]
        out[split] = SplitStats(len(docs), fmean(docs) if docs else None, fmean(refs) if refs else None)
    return CorpusStats(out)
