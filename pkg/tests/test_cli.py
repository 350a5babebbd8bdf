import json

import pytest

from congest_lb import cli
from congest_lb.oracle import CheckRecord, Report


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_build_linear_json(tmp_path, capsys):
    path = tmp_path / "g.json"
    code, out, _ = run(capsys, "build", "--family", "linear", "--ell", "2", "--alpha", "1", "--t", "2",
                       "--promise", "intersect", "--out", str(path), "--format", "json")
    assert code == 0
    assert out.splitlines()[0].startswith("config: ")
    assert "nodes=24" in out and "cut=18" in out
    data = json.loads(path.read_text())
    assert len(data["nodes"]) == 24 and data["seed"] == 0


def test_build_quadratic_and_dot(tmp_path, capsys):
    path = tmp_path / "f.dot"
    code, out, _ = run(capsys, "build", "--family", "quadratic", "--t", "2", "--format", "dot", "--out", str(path))
    assert code == 0 and "nodes=48" in out and "cut=36" in out
    assert path.read_text().startswith("graph G {")


def test_build_unweighted_count(capsys, tmp_path):
    path = tmp_path / "g.json"
    run(capsys, "build", "--promise", "intersect", "--density", "0.6", "--seed", "3", "--format", "json",
        "--out", str(path))
    heavy = sum(1 for v in json.loads(path.read_text())["nodes"] if v["weight"] == 2)
    code, out, _ = run(capsys, "build", "--promise", "intersect", "--density", "0.6", "--seed", "3", "--unweighted")
    assert code == 0
    assert f"nodes={24 + heavy * (2 - 1)}" in out


def test_verify_properties(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "properties", "--ell", "2", "--alpha", "1", "--t", "2")
    assert code == 0 and "FAIL" not in out and out.rstrip().endswith("OK")


def test_verify_linear_claims_t3(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "linear-claims", "--ell", "4", "--alpha", "1", "--t", "3",
                       "--samples", "50")
    assert code == 0
    assert "linear_intersecting_lower: 50/50 (threshold >= 27" in out
    assert "linear_disjoint_upper: 50/50 (threshold <= 25" in out


def test_verify_quadratic_claims_json(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, _, _ = run(capsys, "verify", "--suite", "quadratic-claims", "--format", "json", "--out", str(path))
    assert code == 0
    data = json.loads(path.read_text())
    assert data["pass"] and data["failures"] == 0 and data["config"]["seed"] == 0


@pytest.mark.parametrize("suite", ["code", "family"])
def test_other_suites(capsys, suite):
    code, out, _ = run(capsys, "verify", "--suite", suite, "--t", "3")
    assert code == 0, out


def test_verify_exit_status_tracks_failures(capsys, monkeypatch):
    def failing(g, direct_cross_check=False):
        rep = Report()
        rep.add(CheckRecord("property1", {}, None, 1, 0, "=="))
        return rep

    monkeypatch.setattr(cli, "verify_properties", failing)
    code, out, _ = run(capsys, "verify", "--suite", "properties")
    assert code == 1 and "FAILED: 1" in out


def test_verify_instance_file(capsys, tmp_path):
    path = tmp_path / "x.json"
    path.write_text(json.dumps({"t": 2, "len": 3, "shape": "linear", "strings": ["0x3", "0x6"]}))
    code, out, _ = run(capsys, "verify", "--suite", "linear-claims", "--instance", str(path))
    assert code == 0 and "linear_intersecting_lower: 1/1" in out


def test_reduce_trials(capsys):
    code, out, _ = run(capsys, "reduce", "--trials", "20")
    assert code == 0 and "20/20 correct" in out


def test_reduce_single_and_report_only(capsys):
    code, out, _ = run(capsys, "reduce", "--family", "linear", "--t", "2", "--seed", "1")
    assert code == 0 and "1/1 correct" in out
    code, out, _ = run(capsys, "reduce", "--report-only")
    assert code == 0
    assert "cut_measured" in out and "cut_stated" in out and "trial 1:" not in out


def test_report_both_families(capsys):
    code, out, _ = run(capsys, "report")
    lines = out.splitlines()
    assert code == 0
    assert any(line.split()[0] == "linear" for line in lines[2:])
    assert any(line.split()[0] == "quadratic" for line in lines[2:])


def test_solve(capsys):
    code, out, _ = run(capsys, "solve", "--promise", "intersect", "--format", "json")
    data = json.loads(out.split("\n", 1)[1])
    assert code == 0 and data["weight"] == 10 and data["promise"].startswith("UniquelyIntersecting")


def test_simulate_transcript(capsys, tmp_path):
    path = tmp_path / "t.jsonl"
    code, out, _ = run(capsys, "simulate", "--players", "--promise", "disjoint", "--out", str(path))
    assert code == 0
    summary = json.loads(out.strip().splitlines()[-1])
    assert set(summary["outputs"].values()) == {"REJECT"}
    lines = path.read_text().splitlines()
    assert len(lines) == summary["messages"]
    on_cut = sum(len(json.loads(x)["bits"]) for x in lines if json.loads(x)["on_cut"])
    assert on_cut == summary["blackboard_bits"]


def test_reproducible(capsys):
    a = run(capsys, "reduce", "--trials", "3", "--seed", "5")
    b = run(capsys, "reduce", "--trials", "3", "--seed", "5")
    assert a == b


def test_invalid_params(capsys):
    code, _, err = run(capsys, "build", "--ell", "4", "--alpha", "2", "--backend", "reed_solomon")
    assert code == 2 and "prime power" in err
