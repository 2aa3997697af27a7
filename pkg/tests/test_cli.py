import json

import pytest

from collinear.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def test_count(capsys):
    code, rep, _ = run(capsys, "count", "--alphabet", "3", "--dimension", "2", "--r", "3")
    assert code == 0 and rep["ok"]
    assert rep["result"]["edge_count"] == 8
    assert rep["spec"]["alphabet"] == 3 and len(rep["spec_hash"]) == 64


def test_count_outputs(tmp_path, capsys):
    csv_p, jl = tmp_path / "c.csv", tmp_path / "l.jsonl"
    code, rep, _ = run(capsys, "count", "--csv", str(csv_p), "--lines-out", str(jl))
    assert code == 0
    assert csv_p.read_text().splitlines() == ["points,lines", "3,8"]
    lines = [json.loads(l) for l in jl.read_text().splitlines()]
    assert len(lines) == 8 == rep["result"]["lines_streamed"]


def test_spec_file_and_override(tmp_path, capsys):
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps({"alphabet": 4, "dimension": 2, "r": 4}))
    code, rep, _ = run(capsys, "count", "--spec", str(spec))
    assert rep["result"]["edge_count"] == 10
    code, rep, _ = run(capsys, "count", "--spec", str(spec), "--r", "3")
    assert rep["spec"]["r"] == 3 and rep["spec"]["alphabet"] == 4


def test_bad_spec(tmp_path, capsys):
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps({"alphabet": 3, "colour": "red"}))
    code, rep, err = run(capsys, "count", "--spec", str(spec))
    assert code == 2 and rep is None and "colour" in err
    spec.write_text("{\"alphabet\": ")
    code, _, err = run(capsys, "count", "--spec", str(spec))
    assert code == 2 and "line" in err


def test_budget_exceeded(capsys):
    code, _, err = run(capsys, "count", "--alphabet", "10000", "--dimension", "6", "--budget", "desk")
    assert code == 2 and "BudgetExceeded" in err


def test_out_and_sidecar(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, rep, _ = run(capsys, "count", "--out", str(out))
    assert code == 0 and rep is None
    body = json.loads(out.read_text())
    meta = json.loads((tmp_path / "r.json.meta.json").read_text())
    assert meta["spec_hash"] == body["spec_hash"] and "written_at" in meta
    assert "written_at" not in out.read_text()


def test_analyze_tasks(capsys):
    code, rep, _ = run(capsys, "analyze", "two-color")
    assert code == 0 and rep["result"]["coloring"]["sat"] is True
    code, rep, _ = run(capsys, "analyze", "general-position")
    assert code == 0 and rep["result"]["general_position"]["size"] == 6
    code, rep, _ = run(capsys, "analyze", "lll", "--T", "2", "--r", "5")
    assert code == 0 and rep["result"]["holds"] is True


def test_project(capsys):
    code, rep, _ = run(capsys, "project", "--alphabet", "3", "--dimension", "3")
    assert code == 0 and rep["result"]["certificate"]["image_triples"] == 49


@pytest.mark.parametrize("regime", ["gp-3and4", "eps-net", "weak-net", "cover-decomp"])
def test_pipeline_deterministic(regime, tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["pipeline", "--regime", regime, "--seed", "7", "--out", str(a)]) == 0
    assert main(["pipeline", "--regime", regime, "--seed", "7", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_no_command(capsys):
    assert main([]) == 2
