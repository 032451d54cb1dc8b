"""Report files and plain-text result tables."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from hybridsum.config import RunConfig, dump_config
from hybridsum.factuality import CONVENTIONS, FACTUALITY_FIELDS, EntityDecision

FACTUALITY_HEADERS = {
    "prec_s_NU": "prec_s^NU",
    "prec_s_U": "prec_s^U",
    "prec_t_NU": "prec_t^NU",
    "recall_t_NU": "recall_t^NU",
    "f1_t_NU": "F1_t^NU",
    "prec_t_U": "prec_t^U",
    "recall_t_U": "recall_t^U",
    "f1_t_U": "F1_t^U",
}


def fmt(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.2f}"


def header(col: str) -> str:
    return FACTUALITY_HEADERS.get(col, col)


def text_table(head: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(r[i]) for r in [head] + rows) for i in range(len(head))]

    def line(cells):
        first = cells[0].ljust(widths[0])
        rest = [c.rjust(w) for c, w in zip(cells[1:], widths[1:])]
        return "  ".join([first] + rest).rstrip()

    rule = "-" * len(line(head))
    return "\n".join([line(head), rule] + [line(r) for r in rows])


def _split_columns(columns):
    quality = [c for c in columns if c not in FACTUALITY_FIELDS]
    fact = [c for c in columns if c in FACTUALITY_FIELDS]
    return quality, fact


def render_report(report) -> str:
    meta = report.metadata
    quality, fact = _split_columns(report.columns)
    unit = "macro mean x100" if meta.get("aggregation", "macro") == "macro" else "micro (pooled counts) x100"
    out = [
        "hybridsum evaluation report",
        f"system: {report.system}   samples: {meta['n_samples']} (failed: {meta['n_failed']})   "
        f"config: {meta['config_hash'][:12]}   version: {meta['version']}",
        "",
    ]
    if quality:
        out += [
            "Summary quality (macro mean x100)",
            text_table(["System"] + quality, [[report.system] + [fmt(report.aggregate[c]) for c in quality]]),
            "",
        ]
    if fact:
        out += [
            f"Entity-level factual consistency ({unit})",
            text_table(["System"] + [header(c) for c in fact], [[report.system] + [fmt(report.aggregate[c]) for c in fact]]),
            "",
        ]
    absent = {c: report.metadata["n_samples"] - report.present[c] for c in report.columns}
    if any(absent.values()):
        out.append("Absent values (excluded from means): " + ", ".join(f"{c}={n}" for c, n in absent.items() if n))
    if fact:
        out.append("Conventions:")
        out += [f"  - {c}" for c in CONVENTIONS]
    return "\n".join(out) + "\n"


def aggregate_csv(report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["system"] + [header(c) for c in report.columns])
    w.writerow([report.system] + [fmt(report.aggregate[c]) for c in report.columns])
    w.writerow(["n_present"] + [str(report.present[c]) for c in report.columns])
    return buf.getvalue()


def _dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


def write_predictions(predictions: dict, out_dir: Path, backend: str) -> None:
    with (out_dir / "predictions.jsonl").open("w", encoding="utf-8") as fh:
        for sid in sorted(predictions):
            hyp = predictions[sid]
            if isinstance(hyp, Exception):
                rec = {"id": sid, "backend_id": backend, "summary": None, "error": f"{type(hyp).__name__}: {hyp}"}
            else:
                rec = {"id": sid, "backend_id": backend, "summary": hyp}
            fh.write(_dump(rec) + "\n")


def load_predictions(path) -> dict[str, str | None]:
    out = {}
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            rec = json.loads(line)
            out[rec["id"]] = rec.get("summary")
    return out


def write_report(report, predictions: dict | None, cfg: RunConfig) -> Path:
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if predictions is not None:
        write_predictions(predictions, out_dir, cfg.backend)
    with (out_dir / "per_sample.jsonl").open("w", encoding="utf-8") as fh:
        for row in report.rows:
            fh.write(_dump(row.to_json()) + "\n")
    (out_dir / "aggregate.csv").write_text(aggregate_csv(report), encoding="utf-8")
    (out_dir / "report.txt").write_text(render_report(report), encoding="utf-8")
    # timestamps live here only, so the four report files stay byte-stable
    meta = dict(report.metadata, columns=report.columns)
    (out_dir / "run_meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (out_dir / "config.txt").write_text(dump_config(cfg), encoding="utf-8")
    return out_dir


def render_comparison(cmp) -> str:
    """Both systems as table rows with the better value per column in **bold**, then deltas."""

    def cell(row, side):
        v = row[side]
        s = fmt(v)
        return f"**{s}**" if row["better"] == side else s

    head = ["System"] + [header(r["metric"]) for r in cmp.rows]
    rows = [
        [cmp.system_a] + [cell(r, "a") for r in cmp.rows],
        [cmp.system_b] + [cell(r, "b") for r in cmp.rows],
        ["delta (b-a)"] + ["n/a" if r["delta"] is None else f"{r['delta']:+.2f}" for r in cmp.rows],
    ]
    return text_table(head, rows) + "\n"


_MARK = {"matched": "OK", "supported": "SOURCE-ONLY", "hallucinated": "HALLUCINATED"}


def render_explain(sample_id: str, hyp_text: str, decisions: list[EntityDecision]) -> str:
    """Annotate the hypothesis inline, then list reference entities that it missed."""
    hyp_dec = sorted((d for d in decisions if d.side == "hypothesis"), key=lambda d: d.entity.span)
    pieces, pos = [], 0
    for d in hyp_dec:
        start, end = d.entity.span
        pieces.append(hyp_text[pos:start])
        pieces.append(f"[[{d.entity.surface}|{_MARK[d.status]}]]")
        pos = end
    pieces.append(hyp_text[pos:])
    lines = [f"sample {sample_id}", "", "hypothesis:", "  " + "".join(pieces), "", "entity decisions:"]
    for d in decisions:
        e = d.entity
        lines.append(f"  {d.side:<10}  {e.kind:<14}  {e.surface!r:<22}  {d.status:<12}  source={'yes' if d.in_source else 'no'}")
    missing = [d.entity.surface for d in decisions if d.status == "missing"]
    lines += ["", "missing from hypothesis: " + (", ".join(missing) if missing else "none")]
    return "\n".join(lines) + "\n"
