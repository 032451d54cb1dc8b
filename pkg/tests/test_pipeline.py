import json

import httpx
import pytest

from hybridsum.backend import BackendRegistry, RemoteClient, default_registry
from hybridsum.cli import main
from hybridsum.config import ConfigError, RunConfig, dump_config, parse_config
from hybridsum.pipeline import (
    OUTPUT_FILES,
    compare_runs,
    evaluate_predictions,
    metric_columns,
    parse_embed_spec,
    prepare_corpus,
    report_from_files,
    run_pipeline,
)
from hybridsum.report import render_comparison

TWO = [
    {"id": "a", "split": "test", "document": "Alpha rose. Beta fell. Gamma held.", "summary": "alpha rose"},
    {"id": "b", "split": "test", "document": "Sales grew. Costs fell. Profit rose.", "summary": "profit rose"},
]


@pytest.fixture
def two_sample_corpus(tmp_path):
    p = tmp_path / "two.jsonl"
    p.write_text("".join(json.dumps(r) + "\n" for r in TWO))
    return p


def _cfg(corpus, out, **kw):
    base = dict(corpus_path=str(corpus), output_dir=str(out), workers=2)
    base.update(kw)
    return RunConfig(**base)


def test_metric_columns():
    cfg = RunConfig(embed=("hashing:16", "tiny=fixture:x.txt"), meteor=False)
    assert metric_columns(cfg)[:5] == ["ROUGE-1", "ROUGE-2", "ROUGE-L", "BERTScore[hashing:16]", "tiny"]
    assert parse_embed_spec("tiny=fixture:x.txt") == ("tiny", "fixture:x.txt")


def test_identity_chain_on_fixture(tmp_path, fixture_corpus_path):
    cfg = _cfg(fixture_corpus_path, tmp_path / "r", backend="identity", extract=False)
    corpus = prepare_corpus(cfg)
    preds = {s.id: s.reference for s in corpus}
    rows = evaluate_predictions(corpus, preds, cfg).rows
    for row in rows:
        assert row.metrics["prec_s_U"] is not None
        for col in ("prec_t_U", "recall_t_U", "f1_t_U", "prec_t_NU", "recall_t_NU", "ROUGE-1", "ROUGE-L"):
            assert row.metrics[col] == 1.0


def test_filter_drops_tiny_sample(fixture_corpus_path):
    corpus = prepare_corpus(RunConfig(corpus_path=str(fixture_corpus_path)))
    assert "tiny-2021-q1" not in corpus.by_id()
    assert len(corpus) == 4


def test_run_writes_outputs_and_is_deterministic(tmp_path, fixture_corpus_path):
    outs = []
    for name in ("one", "two"):
        cfg = _cfg(fixture_corpus_path, tmp_path / name, backend="lead-3", embed=("hashing:16",))
        run_pipeline(cfg)
        outs.append(cfg.output_dir)
    for f in OUTPUT_FILES:
        a = (tmp_path / "one" / f).read_bytes()
        assert a == (tmp_path / "two" / f).read_bytes(), f
    meta = json.loads((tmp_path / "one" / "run_meta.json").read_text())
    assert "started_at" in meta and meta["backend"] == "lead-3"


def test_compare_identity_vs_lead2_hand_computed(tmp_path, two_sample_corpus):
    common = dict(min_doc_tokens=1, min_ref_tokens=1, extract=False, meteor=False, factuality=False)
    a = run_pipeline(_cfg(two_sample_corpus, tmp_path / "id", backend="identity", **common))
    b = run_pipeline(_cfg(two_sample_corpus, tmp_path / "l2", backend="lead-2", **common))
    # identity: a,b each P=2/6 R=1 -> F1=1/2; lead-2: a P=2/4 R=1 -> 2/3, b -> 0
    assert a.aggregate["ROUGE-1"] == pytest.approx(50.0, abs=1e-9)
    assert b.aggregate["ROUGE-1"] == pytest.approx(100 / 3, abs=1e-9)
    # bigrams: identity 1 of 5 each -> 1/3; lead-2: a 1 of 3 -> 1/2, b -> 0
    assert a.aggregate["ROUGE-2"] == pytest.approx(100 / 3, abs=1e-9)
    assert b.aggregate["ROUGE-2"] == pytest.approx(25.0, abs=1e-9)
    cmp = compare_runs(report_from_files(tmp_path / "id"), report_from_files(tmp_path / "l2"))
    deltas = {r["metric"]: r["delta"] for r in cmp.rows}
    assert deltas["ROUGE-1"] == pytest.approx(100 / 3 - 50.0, abs=1e-9)
    assert deltas["ROUGE-2"] == pytest.approx(25.0 - 100 / 3, abs=1e-9)
    assert "**50.00**" in render_comparison(cmp)


def test_compare_self_has_zero_deltas(tmp_path, fixture_corpus_path):
    run_pipeline(_cfg(fixture_corpus_path, tmp_path / "r", backend="lead-2"))
    r = report_from_files(tmp_path / "r")
    cmp = compare_runs(r, r)
    assert all(row["delta"] == 0.0 and row["better"] == "tie" for row in cmp.rows if row["delta"] is not None)


def test_compare_rejects_different_samples(tmp_path, fixture_corpus_path):
    a = run_pipeline(_cfg(fixture_corpus_path, tmp_path / "a", split="test"), write=False)
    b = run_pipeline(_cfg(fixture_corpus_path, tmp_path / "b", split="train"), write=False)
    with pytest.raises(ValueError):
        compare_runs(a, b)


def test_transport_failure_marks_sample_absent(tmp_path, fixture_corpus_path):
    def handler(request):
        if request.url.path == "/v1/health":
            return httpx.Response(200, json={"status": "ok"})
        body = json.loads(request.content)
        if body["id"] == "acme-2021-q2":
            return httpx.Response(503)
        return httpx.Response(200, json={"id": body["id"], "summary": "q4 eps $2.94"})

    client = RemoteClient("http://x", transport=httpx.MockTransport(handler), sleep=lambda s: None)
    reg = BackendRegistry()
    reg.register("remote-bart", "remote", endpoint="http://x", client=client)
    cfg = _cfg(fixture_corpus_path, tmp_path / "r", backend="remote-bart")
    report = run_pipeline(cfg, registry=reg)
    row = {r.id: r for r in report.rows}["acme-2021-q2"]
    assert row.error and all(v is None for v in row.metrics.values())
    assert report.present["ROUGE-1"] == len(report.rows) - 1
    others = [r.metrics["ROUGE-1"] for r in report.rows if r.error is None]
    assert report.aggregate["ROUGE-1"] == pytest.approx(100 * sum(others) / len(others))
    pred = [json.loads(x) for x in (tmp_path / "r" / "predictions.jsonl").read_text().splitlines()]
    assert any(p["summary"] is None and "503" in p["error"] for p in pred)


def test_provider_failure_is_absent_not_zero(tmp_path, fixture_corpus_path):
    table = tmp_path / "emb.txt"
    table.write_text("q4 1 0\n")
    cfg = _cfg(fixture_corpus_path, tmp_path / "r", backend="lead-2", embed=(f"tiny=fixture:{table}",))
    report = run_pipeline(cfg, write=False)
    assert report.present["tiny"] == 0
    assert report.aggregate["tiny"] is None
    assert report.aggregate["ROUGE-1"] is not None


def test_micro_aggregation(tmp_path, two_sample_corpus):
    docs = [{"id": "a", "split": "test", "document": "q4 $1 $2 $3", "summary": "q4 $1 $2 $3"},
            {"id": "b", "split": "test", "document": "q1 $9", "summary": "q1 $9"}]
    two_sample_corpus.write_text("".join(json.dumps(r) + "\n" for r in docs))
    preds = {"a": "q4 $1 $2 $3", "b": "$7"}
    common = dict(min_doc_tokens=1, min_ref_tokens=1)
    cfg = _cfg(two_sample_corpus, tmp_path, **common)
    corpus = prepare_corpus(cfg)
    macro = evaluate_predictions(corpus, preds, cfg).aggregate
    micro = evaluate_predictions(corpus, preds, cfg.with_overrides(aggregation="micro")).aggregate
    assert macro["recall_t_NU"] == pytest.approx(50.0)
    assert micro["recall_t_NU"] == pytest.approx(100 * 4 / 6)


def test_config_hash_and_roundtrip():
    cfg = RunConfig(corpus_path="c.jsonl", backend="lead-2", embed=("hashing:8",))
    assert cfg.config_hash() == cfg.with_overrides(output_dir="elsewhere", workers=9).config_hash()
    assert cfg.config_hash() != cfg.with_overrides(backend="identity").config_hash()
    assert parse_config(dump_config(cfg)) == cfg


def test_config_errors():
    with pytest.raises(ConfigError):
        parse_config("nonsense = 1")
    with pytest.raises(ConfigError):
        parse_config("rouge = maybe")
    with pytest.raises(ConfigError):
        RunConfig(aggregation="median")
    with pytest.raises(ConfigError):
        RunConfig(damping=2.0)


def test_unknown_backend_without_endpoint(tmp_path, fixture_corpus_path):
    with pytest.raises(ConfigError):
        run_pipeline(_cfg(fixture_corpus_path, tmp_path, backend="pegasus"), write=False)


# CLI

def test_cli_stats(capsys, fixture_corpus_path):
    assert main(["stats", "--corpus-path", str(fixture_corpus_path), "--raw"]) == 0
    out = capsys.readouterr().out
    assert "pre-filter: 5 samples" in out and "post-filter" in out and "validation" in out


def test_cli_ingest_extract(tmp_path, capsys, fixture_corpus_path):
    out = tmp_path / "clean.jsonl"
    assert main(["ingest", "--corpus-path", str(fixture_corpus_path), "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 4
    sel = tmp_path / "sel.jsonl"
    assert main(["extract", "--corpus-path", str(out), "--max-sentences", "2", "--out", str(sel)]) == 0
    recs = [json.loads(x) for x in sel.read_text().splitlines()]
    assert all(1 <= len(r["selection"].split("\n")) <= 2 for r in recs)


def test_cli_summarize_evaluate_compare(tmp_path, capsys, fixture_corpus_path):
    c = ["--corpus-path", str(fixture_corpus_path), "--split", "test"]
    a, b = str(tmp_path / "a"), str(tmp_path / "b")
    assert main(["summarize", *c, "--backend", "lead-2", "--output-dir", a]) == 0
    assert main(["evaluate", *c, "--output-dir", a, "--backend", "lead-2"]) == 0
    out = capsys.readouterr().out
    assert "Entity-level factual consistency" in out and "prec_s^NU" in out
    assert main(["run", *c, "--backend", "identity", "--no-extract", "--output-dir", b]) == 0
    capsys.readouterr()
    assert main(["compare", a, b]) == 0
    assert "delta (b-a)" in capsys.readouterr().out


def test_cli_explain(tmp_path, capsys, fixture_corpus_path):
    preds = tmp_path / "p.jsonl"
    led = "q4 adjusted pre-tax income of $3.1 billion. q4 adjusted earnings per share $2.94."
    preds.write_text(json.dumps({"id": "psx-2021-q4", "summary": led}) + "\n")
    assert main(["evaluate", "--corpus-path", str(fixture_corpus_path), "--predictions", str(preds),
                 "--explain", "psx-2021-q4"]) == 0
    out = capsys.readouterr().out
    assert "[[$3.1 billion|HALLUCINATED]]" in out
    assert "missing from hypothesis: $2.88" in out


def test_cli_errors_exit_2(tmp_path, capsys):
    assert main(["stats", "--corpus-path", str(tmp_path / "missing.jsonl")]) == 2
    assert main(["stats"]) == 2
    assert "error:" in capsys.readouterr().err


def test_cli_config_file(tmp_path, capsys, fixture_corpus_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"# test\ncorpus_path = {fixture_corpus_path}\nsplit = validation\nbackend = lead-2\n"
                   f"output_dir = {tmp_path / 'out'}\n")
    assert main(["run", "--config", str(cfg)]) == 0
    assert "samples: 1" in capsys.readouterr().out


def test_pinned_fixture_baseline(fixture_corpus_path):
    import sys
    from pathlib import Path

    sys.path.insert(0, str(Path(__file__).parents[1] / "scripts"))
    from run_baseline import baseline_csv

    pinned = (Path(__file__).parent / "fixtures" / "baseline_lexrank_test.csv").read_text("utf-8")
    assert baseline_csv(str(fixture_corpus_path), "test") == pinned
