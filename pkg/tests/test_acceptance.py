"""Desk-scale Monte Carlo checks of the lab against exact and mean-field answers.

Run with ``pytest -m slow``; each test takes seconds to a few minutes.
"""

import numpy as np
import pytest

from src.activation import assumption_constants, build_activation, eval_f_deriv
from src.estimators import fprime_table, sde_ipw
from src.graph import complete_graph, gen_erdos_renyi
from src.harness import ExperimentConfig, run_experiment, run_scenario
from src.meanfield import mf_fixed_point
from src.oracle import exact_mean, exact_sde, exact_stationary
from src.simulate import InitSpec, coupled_ensemble, l1_samples, simulate
from tests.conftest import affine_spec

pytestmark = pytest.mark.slow


def test_coupled_distance_contracts_by_c():
    g = gen_erdos_renyi(50, 0.1, seed=12)
    m = build_activation(affine_spec(a_slope=0.01), g)
    c = assumption_constants(m, g).C
    assert c <= 0.6
    pairs = coupled_ensemble(g, m, 0.5, 0.5, 21, seed=4, replications=200,
                             init_a=InitSpec.fixed([1] * 50), init_b=InitSpec.fixed([0] * 50), workers=4)
    for t in range(1, 21):
        before = l1_samples(pairs, t)
        if before.mean() < 1.0:
            continue
        after = l1_samples(pairs, t + 1)
        se = after.std(ddof=1) / np.sqrt(after.size) / before.mean()
        assert after.mean() / before.mean() <= c + 4 * se


@pytest.mark.parametrize("g", [
    complete_graph(2),
    gen_erdos_renyi(4, 0.6, seed=1),
    gen_erdos_renyi(8, 0.4, seed=2),
], ids=["n2", "n4", "n8"])
def test_time_averages_match_exact_stationary_mean(g):
    assert g.edge_count > 0
    m = build_activation(affine_spec(a_slope=0.03), g)
    exact = exact_mean(exact_stationary(g, m, 0.5))
    averages = np.array([simulate(g, m, 0.5, 200_000, seed=77, replication=r, burn_in=1000).Y[1:].mean(axis=0)
                         for r in range(20)])
    se = averages.std(axis=0, ddof=1) / np.sqrt(len(averages))
    assert np.all(np.abs(averages.mean(axis=0) - exact) <= 4 * se + 1e-9)


def _kinked_model(n: int):
    """Tabulated curves base + L |z - z0| with L D_n = 0.3 and the kink near the typical neighbour count."""
    slope = 0.3 / (n - 1)
    z0 = round(0.27 * (n - 1))
    bases = {"00": 0.1, "01": 0.3, "10": 0.35, "11": 0.5}
    curves = {k: [b + slope * abs(z - z0) for z in range(n)] for k, b in bases.items()}
    g = complete_graph(n)
    return g, build_activation({"family": "tabulated", "curves": curves}, g)


def test_meanfield_gap_shrinks_with_degree():
    gaps = []
    for n in (10, 40, 160):
        g, m = _kinked_model(n)
        p_star = mf_fixed_point(g, m, 0.5).P_star
        per_rep = np.array([simulate(g, m, 0.5, 20_000, seed=n, replication=r, burn_in=1000).Y[1:].mean(axis=0)
                            for r in range(20)])
        # E[Y_i] per unit from the median across replications, then the worst unit
        gaps.append(float(np.abs(np.median(per_rep, axis=0) - p_star).max()))
    assert gaps[0] > gaps[1] > gaps[2]


def _ipw_draws(n: int, rho: float, draws: int) -> tuple[np.ndarray, float]:
    """IPW estimates at t = 0 over fresh treatment draws from one fixed state, and exact_sde there."""
    g = gen_erdos_renyi(n, rho, seed=5)
    m = build_activation(affine_spec(a_slope=0.01), g)
    state = simulate(g, m, 0.5, 0, seed=1, burn_in=200).Y[0]
    start = InitSpec.fixed(state)
    estimates = np.array([sde_ipw(simulate(g, m, 0.5, 1, seed=2, init=start, replication=r), 0)
                          for r in range(draws)])
    return estimates, exact_sde(g, m, state)


@pytest.mark.parametrize("n, rho, draws", [(100, 0.1, 10_000), (400, 0.025, 2_000)])
def test_ipw_is_conditionally_unbiased(n, rho, draws):
    estimates, truth = _ipw_draws(n, rho, draws)
    assert abs(estimates.mean() - truth) <= 3 * estimates.std(ddof=1) / np.sqrt(draws)


def test_ipw_spread_scales_with_root_n():
    sd = {n: _ipw_draws(n, rho, 2_000)[0].std(ddof=1) for n, rho in ((100, 0.1), (400, 0.025))}
    assert 1.6 <= sd[100] / sd[400] <= 2.4


def test_lde_consistency_scenario(tmp_path):
    summary = run_scenario("lde-consistency", out_dir=tmp_path).summary
    errors = summary.sort_values("horizon")["median_abs_error"].tolist()
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] <= 0.02


def test_slope_estimates_match_analytic_derivative():
    n = 200
    theta0 = {"00": -1.0, "01": -0.5, "10": 0.0, "11": 0.5}
    spec = {
        "family": "logistic",
        "curves": {k: {"theta0": v, "thetaz": 1.0} for k, v in theta0.items()},
        "scale": n,
    }
    g = complete_graph(n)
    m = build_activation(spec, g)
    q_star = mf_fixed_point(g, m, 0.5).Q_star
    tables = [fprime_table(simulate(g, m, 0.5, 100_000, seed=9, replication=r, burn_in=1000), g).values
              for r in range(3)]
    stacked = np.stack(tables)
    for y in (0, 1):
        for w in (0, 1):
            analytic = float(np.median([eval_f_deriv(m, i, y, w, q_star[i]) for i in range(n)]))
            estimate = float(np.median(stacked[:, :, y, w]))
            assert np.sign(estimate) == np.sign(analytic)
            assert abs(estimate - analytic) <= 0.5 * abs(analytic)


def _lte_within_tolerance(summary) -> None:
    row = summary.iloc[0]
    estimate, truth = row["median_estimate"] / 0.1, row["truth"] / 0.1
    assert abs(estimate - truth) <= max(0.05, 0.5 * abs(truth))


def test_lte_against_meanfield(tmp_path):
    _lte_within_tolerance(run_scenario("lte-estimation", out_dir=tmp_path).summary)


def test_lte_against_exact_oracle(tmp_path):
    config = ExperimentConfig.from_dict({
        "name": "lte-oracle",
        "graph": {"kind": "erdos_renyi", "n": 8, "rho": 0.4, "seed": 3},
        "model": affine_spec(a_slope=0.01),
        "horizons": [100_000],
        "replications": 20,
        "seed": 13,
        "estimands": [{"kind": "lte", "delta": 0.1}],
        "truth": "oracle",
    })
    _lte_within_tolerance(run_experiment(config, out_dir=tmp_path).summary)
