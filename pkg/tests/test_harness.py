import json
import math

import numpy as np
import pandas as pd
import pytest

from src.activation import build_activation
from src.errors import ConfigInvalid, ReplicationError
from src.graph import complete_graph
from src.harness import (
    COLUMNS,
    BUILTIN_SCENARIOS,
    ExperimentConfig,
    load_scenario,
    prepare,
    resolve_truth_mode,
    run_experiment,
    run_scenario,
    scenario_names,
)
from src.oracle import exact_lte
from src.utils import write_json
from tests.conftest import CONSTANT_SPEC, affine_spec


def tiny(**overrides) -> dict:
    payload = {
        "name": "tiny",
        "graph": {"kind": "complete", "n": 3},
        "model": affine_spec(a_slope=0.02),
        "policy": 0.5,
        "horizons": [300, 600],
        "replications": 3,
        "seed": 9,
        "burn_in": 50,
        "estimands": [
            "sde",
            {"kind": "sde", "t": 0},
            {"kind": "lde", "gamma1": 0.6, "gamma2": 0.4},
            {"kind": "lte", "delta": 0.1},
            "mean",
        ],
        "truth": "oracle",
    }
    payload.update(overrides)
    return payload


def test_config_reports_every_problem():
    bad = tiny(horizons=[0], replications=-1, truth="guess", estimands=["ate", {"kind": "lte", "m_guard": "x"}],
               colour="red")
    with pytest.raises(ConfigInvalid) as info:
        ExperimentConfig.from_dict(bad)
    details = info.value.details
    for fragment in ("horizons", "replications", "truth", "unknown estimand 'ate'", "m_guard", "colour"):
        assert fragment in details


def test_duplicate_estimand_names():
    with pytest.raises(ConfigInvalid, match="invalid") as info:
        ExperimentConfig.from_dict(tiny(estimands=["sde", {"kind": "sde"}]))
    assert "duplicate" in info.value.details
    config = ExperimentConfig.from_dict(tiny(estimands=["sde", {"kind": "sde", "label": "again"}]))
    assert [e.name for e in config.estimands] == ["sde", "again"]


def test_config_normalisation():
    config = ExperimentConfig.from_dict(tiny(horizons=[600, 300, 600]))
    assert config.horizons == [300, 600]
    assert ExperimentConfig.from_dict(tiny(horizons=50)).horizons == [50]
    assert [e.name for e in config.estimands] == ["sde", "sde_t0", "lde", "lte", "mean"]


def test_burn_in_defaults():
    assert ExperimentConfig.from_dict(tiny(burn_in=None)).effective_burn_in == 1000
    assert ExperimentConfig.from_dict(tiny(burn_in=None, estimands=["sde"])).effective_burn_in == 0
    assert ExperimentConfig.from_dict(tiny(burn_in=7)).effective_burn_in == 7


def test_config_file(tmp_path):
    path = write_json(tmp_path / "exp.json", dict(tiny(), name=None))
    config = ExperimentConfig.load(path)
    assert config.name == "exp" and config.source == path
    with pytest.raises(ConfigInvalid):
        ExperimentConfig.load(tmp_path / "missing.json")


def test_truth_mode_resolution():
    assert resolve_truth_mode("auto", 5, 12) == "oracle"
    assert resolve_truth_mode("auto", 50, 12) == "meanfield"
    assert resolve_truth_mode("none", 50, 12) == "none"
    with pytest.raises(ConfigInvalid):
        resolve_truth_mode("oracle", 13, 12)


def test_prepare_checks_estimands_against_inputs():
    with pytest.raises(ConfigInvalid, match="t=300"):
        prepare(ExperimentConfig.from_dict(tiny(estimands=[{"kind": "sde", "t": 300}])))
    with pytest.raises(ConfigInvalid, match="direction"):
        prepare(ExperimentConfig.from_dict(tiny(estimands=[{"kind": "lte", "v": [1.0, 1.0]}])))
    with pytest.raises(ConfigInvalid):
        prepare(ExperimentConfig.from_dict(tiny(graph={"kind": "empty", "n": 13}, model=CONSTANT_SPEC)))


def test_zero_replications_write_headers(tmp_path):
    result = run_experiment(ExperimentConfig.from_dict(tiny(replications=0)), out_dir=tmp_path)
    assert result.estimates.empty
    assert (tmp_path / "estimates.csv").read_text().strip() == ",".join(COLUMNS)
    assumptions = json.loads((tmp_path / "assumptions.json").read_text())
    assert assumptions["constants"]["D_n"] == 2
    assert assumptions["truth_mode"] == "oracle"


def test_rows_and_truths(tmp_path):
    config = ExperimentConfig.from_dict(tiny())
    result = run_experiment(config, out_dir=tmp_path, workers=2)
    frame = result.estimates
    assert len(frame) == 3 * 2 * 5
    assert frame["replication"].tolist() == sorted(frame["replication"].tolist())
    assert set(frame.loc[frame["estimand"].str.startswith("sde"), "truth_mode"]) == {"state"}

    g = complete_graph(3)
    m = build_activation(affine_spec(a_slope=0.02), g)
    lte_truth = exact_lte(g, m, 0.6, 0.5)
    assert frame.loc[frame["estimand"] == "lte", "truth"].to_numpy() == pytest.approx(lte_truth)
    assert result.assumptions["truths"]["lte"] == pytest.approx(lte_truth)

    lde = frame[frame["estimand"] == "lde"]
    assert (lde["min_cell_visits"] > 0).all()
    assert (frame["burn_in"] == 50).all()

    summary = pd.read_csv(tmp_path / "summary.csv")
    assert len(summary) == 2 * 5
    assert (summary["count"] == 3).all()


def test_state_truth_for_first_decision(tmp_path):
    config = ExperimentConfig.from_dict(tiny(estimands=[{"kind": "sde", "t": 0}], burn_in=0, truth="auto"))
    frame = run_experiment(config, out_dir=tmp_path).estimates
    assert frame["truth_mode"].unique().tolist() == ["state"]
    assert np.isfinite(frame["truth"]).all()


def test_no_truth(tmp_path):
    config = ExperimentConfig.from_dict(tiny(estimands=["mean"], truth="none"))
    frame = run_experiment(config, out_dir=tmp_path).estimates
    assert frame["truth"].isna().all()
    assert json.loads((tmp_path / "assumptions.json").read_text())["truths"] == {}


def test_runs_are_byte_identical(tmp_path):
    config = ExperimentConfig.from_dict(tiny())
    run_experiment(config, out_dir=tmp_path / "a", workers=1)
    run_experiment(config, out_dir=tmp_path / "b", workers=3)
    for name in ("estimates.csv", "summary.csv", "assumptions.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_prefix_rows_match_separate_runs(tmp_path):
    both = run_experiment(ExperimentConfig.from_dict(tiny()), out_dir=tmp_path / "both").estimates
    short = run_experiment(ExperimentConfig.from_dict(tiny(horizons=[300])), out_dir=tmp_path / "short").estimates
    head = both[both["horizon"] == 300].reset_index(drop=True)
    assert head["estimate"].tolist() == short["estimate"].tolist()


def test_json_output(tmp_path):
    config = ExperimentConfig.from_dict(tiny(estimands=["lte"], replications=1))
    result = run_experiment(config, out_dir=tmp_path, output_format="json")
    lines = (tmp_path / "estimates.jsonl").read_text().splitlines()
    assert len(lines) == 2
    record = json.loads(lines[0])
    assert set(record["flags"]) == {"floored_cells", "clipped_omega", "guarded_rows", "direct_solve"}
    assert result.files["jsonl"].name == "estimates.jsonl"


def test_estimator_failure_names_the_replication(tmp_path):
    config = ExperimentConfig.from_dict(tiny(horizons=[2], estimands=["lde"], replications=2))
    with pytest.raises(ReplicationError) as info:
        run_experiment(config, out_dir=tmp_path, workers=1)
    assert info.value.replication in (0, 1)
    assert "empty cell" in info.value.details


def test_progress_callback(tmp_path):
    seen = []
    run_experiment(ExperimentConfig.from_dict(tiny(estimands=["mean"])), out_dir=tmp_path,
                   on_progress=lambda done, total: seen.append((done, total)))
    assert seen == [(1, 3), (2, 3), (3, 3)]


def test_scenarios(tmp_path):
    assert set(BUILTIN_SCENARIOS) <= set(scenario_names())
    for name in BUILTIN_SCENARIOS:
        config = load_scenario(name)
        assert config.name == name
        assert config.replications >= 1
    with pytest.raises(ConfigInvalid):
        load_scenario("nope", directory=tmp_path)
    write_json(tmp_path / "mine.json", tiny(name="mine"))
    assert load_scenario("mine", directory=tmp_path).horizons == [300, 600]


def test_smoke_scenario(tmp_path):
    result = run_scenario("smoke", out_dir=tmp_path)
    truths = result.assumptions["truths"]
    assert truths["mean"] == pytest.approx(0.2 / 0.65)
    assert truths["lde"] == pytest.approx(0.036058, abs=1e-6)
    assert truths["lte"] == pytest.approx(0.036058, abs=1e-6)
    long_run = result.estimates[result.estimates["horizon"] == 20000]
    means = long_run.loc[long_run["estimand"] == "mean", "estimate"]
    assert (means - 0.2 / 0.65).abs().max() < 0.03
    assert not math.isnan(result.summary["median_abs_error"].iloc[0])
