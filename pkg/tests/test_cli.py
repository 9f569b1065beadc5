import json
import subprocess
import sys

import pytest

from slebubbles import acceptance, cli
from slebubbles import harness as hs
from slebubbles.markov_path import Estimate


def run(args, env=None, cwd=None):
    return subprocess.run([sys.executable, "-m", "slebubbles.cli", *args], capture_output=True,
                          text=True, env=env, cwd=cwd)


def test_criterion(capsys):
    assert cli.main(["criterion", "--kappa", "6"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["cot_term"] == pytest.approx(0.0, abs=1e-14)
    assert out["digamma_term"] == pytest.approx(-1.3862943611, abs=1e-10)
    assert out["total"] == pytest.approx(-1.3862943611, abs=1e-10)


def test_kappa0(capsys):
    assert cli.main(["kappa0", "--tol", "1e-9"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert str(out["kappa0"]).startswith("5.61579")
    assert out["F_below"] > 0 > out["F_above"]


def test_simulate_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert cli.main(["simulate", "--kappa", "6", "--n", "16", "--seed", "7", "--replicas", "50",
                         "--output", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()
    header, *rows = a.read_text().splitlines()
    assert header.split(",") == list(Estimate.CSV_FIELDS)
    assert len(rows) == 3


def test_simulate_subprocess_deterministic(tmp_path):
    args = ["simulate", "--kappa", "6", "--n", "16", "--seed", "7", "--replicas", "20"]
    a, b = run(args), run(args)
    assert a.returncode == 0 and a.stdout == b.stdout and a.stdout


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["nonsense"])
    assert exc.value.code == 2
    assert cli.main(["criterion", "--kappa", "9"]) == 2
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "usage"
    assert cli.main(["simulate", "--quantities", "bogus", "--n", "16", "--replicas", "2"]) == 2


def test_runtime_failure_exit_code(capsys):
    code = cli.main(["simulate", "--kappa", "6", "--n", "65536", "--replicas", "20",
                     "--horizon-cap", "16", "--quantities", "log_R_gap"])
    assert code == 1
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "runtime" and err["failures"] > 0


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# test config\nkappa = 5.5\nn = 16\nreplicas = 10\nseed = 3\n"
                   "quantities = log_overshoot\nformat = json\n")
    assert cli.main(["simulate", "--config", str(cfg), "--kappa", "6.5"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["config"]["kappa"] == 6.5 and rep["config"]["n"] == 16
    assert rep["estimates"][0]["quantity"] == "log_overshoot"
    assert "seed_rule" in rep and "version" in rep
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert cli.main(["simulate", "--config", str(bad)]) == 2


def test_config_roundtrip():
    c = hs.ExperimentConfig(kappa=5.25, kappa_grid=(5.0, 6.0), quantities=("log_R_gap",), n=64)
    assert hs.ExperimentConfig.from_text(c.to_text()) == c
    assert hs.ExperimentConfig.from_text(hs.ExperimentConfig().to_text()) == hs.ExperimentConfig()


def test_output_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv(hs.OUTPUT_ENV, str(tmp_path))
    assert cli.main(["criterion", "--kappa", "5"]) == 0
    assert json.loads((tmp_path / "criterion.json").read_text())["kappa"] == 5.0


def test_sweep(tmp_path):
    out = tmp_path / "s.json"
    assert cli.main(["sweep", "--kappa-grid", "5.5,6.5", "--n", "16", "--replicas", "10",
                     "--quantities", "log_L_gap,log_R_gap", "--format", "json", "--output", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert sorted({(e["kappa"], e["quantity"]) for e in rep["estimates"]}) == [
        (5.5, "log_L_gap"), (5.5, "log_R_gap"), (6.5, "log_L_gap"), (6.5, "log_R_gap")]


def test_graph_formats(tmp_path, capsys):
    assert cli.main(["graph", "--kappa", "6", "--n", "64", "--horizon", "500", "--seed", "1",
                     "--format", "dot"]) == 0
    cap = capsys.readouterr()
    assert cap.out.startswith("graph bubbles {")
    assert "largest_fraction" in json.loads(cap.err.strip().splitlines()[-1])
    p = tmp_path / "g.json"
    assert cli.main(["graph", "--n", "64", "--horizon", "500", "--format", "json", "--output", str(p)]) == 0
    assert "nodes" in json.loads(p.read_text())


def test_small_subcommands(capsys):
    assert cli.main(["bayes-enum", "--kappa", "6", "--t", "3", "--M-cap", "3", "--r", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["tv"] <= 1e-12
    assert cli.main(["markov-path", "--kappa", "6.5", "--n", "16", "--K", "3", "--replicas", "2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out["paths"]) == 2
    assert cli.main(["overshoot", "--n", "64", "--replicas", "50"]) == 0
    assert "estimate" in json.loads(capsys.readouterr().out)
    assert cli.main(["arcsine", "--n", "64", "--replicas", "50"]) == 0
    assert "ks" in json.loads(capsys.readouterr().out)
    assert cli.main(["domination", "--n", "16", "--replicas", "50"]) == 0
    assert "D_minus" in json.loads(capsys.readouterr().out)
    assert cli.main(["sup-criterion", "--n", "16", "--replicas", "10", "--kappa", "7"]) == 0
    capsys.readouterr()
    assert cli.main(["reversal", "--n", "16", "--replicas", "50"]) == 0
    assert "bins" in json.loads(capsys.readouterr().out)


GOLDEN_KEYS = {"schema", "fast", "criteria", "failed", "all_passed"}
GOLDEN_CRITERION_KEYS = {"number", "name", "passed", "seconds", "measured"}


def test_validate_summary_schema(capsys):
    code = cli.main(["validate", "--only", "1,3"])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert set(out) == GOLDEN_KEYS and out["schema"] == 1
    assert [c["number"] for c in out["criteria"]] == [1, 3]
    for c in out["criteria"]:
        assert set(c) == GOLDEN_CRITERION_KEYS
    assert out["all_passed"] and out["failed"] == []


def test_validate_failure_exit(monkeypatch, capsys):
    def fake_all(fast=False, only=None, echo=print):
        return [acceptance.CriterionResult(99, "always fails", False, {"x": 1.0})]
    monkeypatch.setattr(acceptance, "run_all", fake_all)
    assert cli.main(["validate", "--fast"]) == 1
    out = json.loads(capsys.readouterr().out)
    assert out["fast"] is True and out["failed"] == [99]
