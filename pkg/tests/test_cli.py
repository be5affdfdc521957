"""CLI surface: subcommands, exit codes, manifests, determinism."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from fimpipe.cli import main
from fimpipe.synth import make_corpus, make_telemetry_log, write_corpus


@pytest.fixture(scope="module")
def repo(tmp_path_factory):
    root = tmp_path_factory.mktemp("repo")
    write_corpus(make_corpus(12, seed=3), root)
    return root


def read_jsonl(path):
    return [json.loads(line) for line in Path(path).read_text().splitlines()]


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as err:
        main(["--version"])
    assert err.value.code == 0
    out = capsys.readouterr().out
    assert "fimpipe" in out and "proto" in out


def test_missing_config_exits_2(tmp_path):
    rc = main(["--config", str(tmp_path / "missing.json"), "ingest",
               "--root", str(tmp_path), "--out", str(tmp_path / "o.jsonl")])
    assert rc == 2


def test_invalid_config_key_exits_2(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"not_a_key": 1}))
    rc = main(["--config", str(cfg), "ingest", "--root", str(tmp_path),
               "--out", str(tmp_path / "o.jsonl")])
    assert rc == 2


def test_ingest_output_schema(repo, tmp_path):
    out = tmp_path / "files.jsonl"
    assert main(["ingest", "--root", str(repo), "--out", str(out)]) == 0
    rows = read_jsonl(out)
    assert rows
    for row in rows:
        assert {"repo_id", "path", "language", "size_bytes",
                "accepted", "reasons"} <= set(row)
    manifest = json.loads(Path(str(out) + ".manifest.json").read_text())
    assert manifest["subcommand"] == "ingest"
    assert manifest["config_hash"]


def test_pipeline_deterministic(repo, tmp_path):
    out1 = tmp_path / "run1"
    out2 = tmp_path / "run2"
    assert main(["pipeline", "--root", str(repo), "--seed", "7",
                 "--out-dir", str(out1)]) == 0
    assert main(["pipeline", "--root", str(repo), "--seed", "7",
                 "--out-dir", str(out2)]) == 0
    for name in ("files.jsonl", "examples.jsonl", "contexts.jsonl",
                 "training.jsonl"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name
    records = read_jsonl(out1 / "training.jsonl")
    assert records
    assert all(r["token_estimate"] <= 16000 for r in records)


def test_eval_cli_and_missing_ids(repo, tmp_path):
    out = tmp_path / "arts"
    assert main(["pipeline", "--root", str(repo), "--seed", "2",
                 "--out-dir", str(out)]) == 0
    examples = read_jsonl(out / "examples.jsonl")
    preds = [{"example_id": e["id"], "generated": e["middle"]}
             for e in examples[:-1]]  # drop one -> missing prediction
    preds_path = tmp_path / "preds.jsonl"
    preds_path.write_text("\n".join(json.dumps(p) for p in preds) + "\n")
    report_path = tmp_path / "report.json"
    rc = main(["eval", "--dataset", str(out / "examples.jsonl"),
               "--preds", str(preds_path), "--metrics", "em,pm,es",
               "--report", str(report_path)])
    assert rc == 1  # missing prediction -> partial
    report = json.loads(report_path.read_text())
    assert report["counts"]["missing_predictions"] == 1
    assert report["overall"]["prefix_match"] is not None


def test_eval_cli_perfect_predictions(repo, tmp_path):
    out = tmp_path / "arts2"
    assert main(["pipeline", "--root", str(repo), "--seed", "2",
                 "--out-dir", str(out)]) == 0
    examples = read_jsonl(out / "examples.jsonl")
    preds = [{"example_id": e["id"], "generated": e["middle"]} for e in examples]
    preds_path = tmp_path / "preds.jsonl"
    preds_path.write_text("\n".join(json.dumps(p) for p in preds) + "\n")
    report_path = tmp_path / "report.json"
    rc = main(["eval", "--dataset", str(out / "examples.jsonl"),
               "--preds", str(preds_path), "--metrics", "em,pm,es",
               "--report", str(report_path)])
    assert rc == 0
    report = json.loads(report_path.read_text())
    assert report["overall"]["exact_match"] == 1.0
    assert report["overall"]["edit_similarity"] == 1.0


def test_analyze_cli_with_plot_data(tmp_path):
    events = make_telemetry_log(200, seed=5)
    events_path = tmp_path / "events.jsonl"
    events_path.write_text("\n".join(json.dumps(e) for e in events) + "\n")
    report_path = tmp_path / "telemetry.json"
    csv_path = tmp_path / "fig.csv"
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"analyzer": {"min_node_events": 5}}))
    rc = main(["--config", str(cfg_path), "analyze", "--events",
               str(events_path), "--report", str(report_path),
               "--plot-data", str(csv_path)])
    assert rc == 0
    report = json.loads(report_path.read_text())
    assert 0.0 <= report["car"] <= 1.0
    assert set(report["cpr"]) == {"30", "120", "300"}
    header = csv_path.read_text().splitlines()[0]
    assert header == "language,node_type,relative_car_pct"


def test_bench_cli_end_to_end(tmp_path):
    snapshot = tmp_path / "snap"
    snapshot.mkdir()
    (snapshot / "calc.py").write_text("def add(a, b):\n    return a + b\n")
    (snapshot / "run_test.py").write_text(
        "import sys\nimport calc\n"
        "sys.exit(0 if hasattr(calc, 'scale') and calc.scale([2], 3) == [6] else 1)\n")
    diff = """--- a/calc.py
+++ b/calc.py
@@ -1,2 +1,6 @@
 def add(a, b):
     return a + b
+
+
+def scale(values, factor):
+    return [v * factor for v in values]
"""
    patches = tmp_path / "pr.diff"
    patches.write_text(diff)
    problems_path = tmp_path / "problems.jsonl"
    rc = main(["bench", "build", "--snapshot", str(snapshot),
               "--patches", str(patches), "--runner", "python3 run_test.py",
               "--out", str(problems_path)])
    assert rc == 0
    problems = read_jsonl(problems_path)
    assert len(problems) == 1
    gens_path = tmp_path / "gens.jsonl"
    gens_path.write_text(json.dumps({
        "problem_id": problems[0]["problem_id"],
        "generated": problems[0]["ground_truth_middle"]}) + "\n")
    report_path = tmp_path / "pass1.json"
    rc = main(["bench", "eval", "--problems", str(problems_path),
               "--gens", str(gens_path), "--report", str(report_path)])
    assert rc == 0
    report = json.loads(report_path.read_text())
    assert report["pass_at_1"] == 1.0
