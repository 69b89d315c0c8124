import json

import pytest

from main import main
from src.config import reset_config
from src.utils import write_json
from tests.conftest import affine_spec

VIOLATING = {
    "name": "rough",
    "graph": {"kind": "complete", "n": 9},
    "model": {
        "family": "affine",
        "decomposition": {"a": {"base": 0.05, "slope": 0.1}, "b": 0.1, "c": {"base": 0.5, "slope": -0.1}, "d": 0.0},
    },
    "estimands": ["mean"],
}


@pytest.fixture
def small_config(tmp_path):
    payload = {
        "name": "small",
        "graph": {"kind": "path", "n": 3},
        "model": affine_spec(a_slope=0.05),
        "horizons": [400],
        "replications": 2,
        "seed": 3,
        "burn_in": 20,
        "estimands": ["sde", "lde", "lte", "mean"],
    }
    return write_json(tmp_path / "small.json", payload)


def test_scenarios_listing(capsys):
    assert main(["scenarios"]) == 0
    names = capsys.readouterr().out.split()
    assert "smoke" in names and "lte-estimation" in names


def test_validate_ok(capsys):
    assert main(["validate", "--scenario", "smoke"]) == 0
    assert "Assumption constants" in capsys.readouterr().out


def test_validate_json(capsys, tmp_path):
    assert main(["validate", "--scenario", "smoke", "--format", "json", "--out", str(tmp_path)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["constants"]["C"] == pytest.approx(0.4)
    assert (tmp_path / "assumptions.json").exists()


def test_validate_rejects_contraction_violation(tmp_path, capsys):
    path = write_json(tmp_path / "rough.json", VIOLATING)
    assert main(["validate", "--config", str(path)]) == 1
    assert "Contraction condition violated" in capsys.readouterr().out


def test_config_errors_exit_with_validation_status(tmp_path, capsys):
    assert main(["validate", "--scenario", "nope"]) == 1
    assert "Unknown scenario" in capsys.readouterr().err
    write_json(tmp_path / "bad.json", {"name": "bad"})
    assert main(["validate", "--config", str(tmp_path / "bad.json")]) == 1
    assert main(["validate", "--config", str(tmp_path / "bad.json"), "--scenario", "smoke"]) == 1
    assert main(["validate", "--scenario", "smoke", "--seed", "-3"]) == 1


def test_oracle_smoke(capsys, tmp_path):
    assert main(["oracle", "--scenario", "smoke", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "0.307692" in out
    assert "0.0360577" in out
    assert (tmp_path / "distribution.csv").read_text().splitlines()[0] == "state,probability"


def test_oracle_cap(capsys, small_config):
    assert main(["oracle", "--config", str(small_config), "--cap", "2"]) == 1
    assert "Exact oracle refused n=3" in capsys.readouterr().err


def test_oracle_cap_flag_beats_configured_cap(capsys, small_config, tmp_path, monkeypatch):
    monkeypatch.setenv("MRT_ORACLE_CAP", "2")
    reset_config()
    assert main(["oracle", "--config", str(small_config), "--cap", "4", "--format", "json",
                 "--out", str(tmp_path / "o")]) == 0
    truths = json.loads(capsys.readouterr().out)["truths"]
    assert set(truths) == {"lde", "lte", "mean"}


def test_meanfield_json(capsys, tmp_path):
    assert main(["meanfield", "--scenario", "smoke", "--format", "json", "--out", str(tmp_path)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["mean_P_star"] == pytest.approx(0.2 / 0.65)
    assert payload["lte"] == pytest.approx(0.036058, abs=1e-6)
    assert payload["mean_derivative"] == pytest.approx(0.355030, abs=1e-6)
    assert (tmp_path / "meanfield.json").exists()


def test_meanfield_violation_needs_warn(tmp_path):
    path = write_json(tmp_path / "rough.json", VIOLATING)
    assert main(["meanfield", "--config", str(path), "--out", str(tmp_path / "a")]) == 1
    assert main(["meanfield", "--config", str(path), "--warn", "--out", str(tmp_path / "b")]) == 0


def test_simulate_then_estimate(capsys, tmp_path, small_config):
    out = tmp_path / "sim"
    assert main(["simulate", "--config", str(small_config), "--out", str(out), "--seed", "5"]) == 0
    path = out / "trajectory_r0.csv"
    assert path.exists()
    capsys.readouterr()

    assert main(["estimate", "--config", str(small_config), "--trajectory", str(path),
                 "--format", "json", "--out", str(tmp_path / "est")]) == 0
    records = json.loads(capsys.readouterr().out)
    assert [r["estimand"] for r in records] == ["sde_avg", "lde", "lte"]
    assert all(r["seed"] == 5 for r in records)
    assert len((tmp_path / "est" / "estimates.jsonl").read_text().splitlines()) == 3


def test_binary_dump_round_trips_through_estimate(tmp_path, small_config):
    out = tmp_path / "sim"
    assert main(["simulate", "--config", str(small_config), "--out", str(out), "--binary",
                 "--replication", "4"]) == 0
    assert main(["estimate", "--config", str(small_config), "--trajectory", str(out / "trajectory_r4.bin")]) == 0


def test_estimate_on_too_short_run_is_a_runtime_failure(tmp_path, small_config, capsys):
    out = tmp_path / "sim"
    assert main(["simulate", "--config", str(small_config), "--out", str(out), "--horizon", "3"]) == 0
    assert main(["estimate", "--config", str(small_config), "--trajectory", str(out / "trajectory_r0.csv")]) == 2
    assert "empty cell" in capsys.readouterr().err


def test_experiment(tmp_path, small_config, capsys):
    out = tmp_path / "exp"
    assert main(["experiment", "--config", str(small_config), "--out", str(out), "--workers", "2"]) == 0
    for name in ("estimates.csv", "summary.csv", "assumptions.json"):
        assert (out / name).exists()
    assert "|error|" in capsys.readouterr().out


def test_experiment_json_summary(tmp_path, small_config, capsys):
    assert main(["experiment", "--config", str(small_config), "--out", str(tmp_path), "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert {r["estimand"] for r in rows} == {"sde", "lde", "lte", "mean"}
    assert (tmp_path / "estimates.jsonl").exists()


def test_experiment_failure_marks_the_step(tmp_path, capsys):
    payload = {
        "name": "short",
        "graph": {"kind": "path", "n": 3},
        "model": affine_spec(a_slope=0.05),
        "horizons": [2],
        "replications": 2,
        "estimands": ["lde"],
    }
    path = write_json(tmp_path / "short.json", payload)
    assert main(["experiment", "--config", str(path), "--out", str(tmp_path / "exp"), "--workers", "1"]) == 2
    err = capsys.readouterr().err
    assert "Failed: Simulate" in err and "Experiment failed" in err


def test_experiment_builds_inputs_once(tmp_path, small_config, monkeypatch):
    import src.harness.runner as runner

    calls = []
    original = runner.build_graph

    def counting(spec):
        calls.append(spec)
        return original(spec)

    monkeypatch.setattr(runner, "build_graph", counting)
    assert main(["experiment", "--config", str(small_config), "--out", str(tmp_path / "exp")]) == 0
    assert len(calls) == 1
