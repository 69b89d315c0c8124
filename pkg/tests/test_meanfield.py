import numpy as np
import pytest

from src.activation import assumption_constants, build_activation
from src.errors import ContractionViolation, LengthMismatch, StaleSolution, ValidationError
from src.graph import complete_graph, empty_graph, gen_erdos_renyi
from src.meanfield import (
    MeanFieldSolution,
    default_max_iter,
    direction,
    mean_field_bounds,
    mf_derivative,
    mf_fixed_point,
    mf_jacobian_parts,
    mf_lde,
    mf_lte,
    mf_lte_linear,
    mf_step,
)
from tests.conftest import affine_spec

VIOLATING = {
    "family": "affine",
    "decomposition": {"a": {"base": 0.05, "slope": 0.1}, "b": 0.1, "c": {"base": 0.5, "slope": -0.1}, "d": 0.0},
}


def test_single_unit_fixed_point(constant_single):
    g, m = constant_single
    sol = mf_fixed_point(g, m, 0.5)
    assert sol.P_star[0] == pytest.approx(0.2 / 0.65, abs=1e-9)
    assert round(float(sol.P_star[0]), 6) == 0.307692
    assert sol.residual <= 1e-10


def test_symmetric_complete_graph(complete5):
    g, m = complete5
    sol = mf_fixed_point(g, m, 0.5)
    assert np.allclose(sol.P_star, 0.2 / 0.61, atol=1e-9)
    assert round(float(sol.P_star[0]), 6) == 0.327869
    assert np.allclose(sol.Q_star, 4 * sol.P_star)


def test_fixed_point_unique_from_random_starts():
    g = gen_erdos_renyi(50, 0.1, seed=4)
    m = build_activation(affine_spec(a_slope=0.01), g)
    reference = mf_fixed_point(g, m, 0.5).P_star
    rng = np.random.default_rng(0)
    for _ in range(10):
        start = rng.uniform(0.0, 1.0, size=g.n)
        assert np.abs(mf_fixed_point(g, m, 0.5, P0=start).P_star - reference).max() < 1e-8


def test_iterates_contract_by_c():
    g = gen_erdos_renyi(50, 0.1, seed=4)
    m = build_activation(affine_spec(a_slope=0.01), g)
    c = assumption_constants(m, g).C
    target = mf_fixed_point(g, m, 0.5, tol=1e-14).P_star
    P = np.zeros(g.n)
    gap = np.abs(P - target).sum()
    for _ in range(15):
        P = mf_step(g, m, 0.5, P)
        new_gap = np.abs(P - target).sum()
        if gap > 1e-11:
            assert new_gap <= c * gap + 1e-12
        gap = new_gap


def test_contraction_violation_raises_or_warns(caplog):
    g = complete_graph(9)
    m = build_activation(VIOLATING, g)
    with pytest.raises(ContractionViolation):
        mf_fixed_point(g, m, 0.5)
    sol = mf_fixed_point(g, m, 0.5, on_violation="warn")
    assert sol.residual < 1e-8
    assert "C=1.3" in caplog.text
    with pytest.raises(ValidationError):
        mf_fixed_point(g, m, 0.5, on_violation="ignore")


def test_start_vector_checked(constant_single):
    g, m = constant_single
    with pytest.raises(LengthMismatch):
        mf_fixed_point(g, m, 0.5, P0=[0.1, 0.2])


def test_default_max_iter():
    assert default_max_iter(1.2, 1e-10, 10) == 10_000
    assert default_max_iter(0.0, 1e-10, 10) == 51
    assert default_max_iter(0.5, 1e-10, 1) == 34 + 50


def test_jacobian_parts_single_unit(constant_single):
    g, m = constant_single
    sol = mf_fixed_point(g, m, 0.5)
    D, W, u = mf_jacobian_parts(g, m, sol, 0.5)
    assert D[0] == 0.0
    assert W[0] == pytest.approx(0.35)
    assert u[0] == pytest.approx(0.2 + 0.1 * 0.2 / 0.65)
    assert round(float(u[0]), 6) == 0.230769


def test_single_unit_derivative_matches_closed_form(constant_single):
    g, m = constant_single
    p = mf_derivative(g, m, 0.5)
    assert p[0] == pytest.approx(0.15 / 0.4225, abs=1e-9)
    assert round(float(p[0]), 6) == 0.355030


def test_derivative_matches_finite_difference(complete5):
    g, m = complete5
    h = 1e-6
    up = mf_fixed_point(g, m, 0.5 + h, tol=1e-14).P_star
    down = mf_fixed_point(g, m, 0.5 - h, tol=1e-14).P_star
    assert np.allclose(mf_derivative(g, m, 0.5), (up - down) / (2 * h), atol=1e-6)


def test_stale_solution_rejected(complete5):
    g, m = complete5
    sol = mf_fixed_point(g, m, 0.5)
    with pytest.raises(StaleSolution):
        mf_jacobian_parts(g, m, sol, 0.4)
    other = complete_graph(5)
    with pytest.raises(StaleSolution):
        mf_jacobian_parts(other, build_activation(affine_spec(a_slope=0.02), other), sol, 0.5)


def test_single_unit_effects(constant_single):
    g, m = constant_single
    expected = 0.22 / 0.64 - 0.2 / 0.65
    assert mf_lte(g, m, 0.5, 0.1) == pytest.approx(expected, abs=1e-9)
    assert round(mf_lte(g, m, 0.5, 0.1), 6) == 0.036058
    assert mf_lde(g, m, 0.5, 0.6, 0.5) == pytest.approx(expected, abs=1e-9)
    assert mf_lte(g, m, 0.5, 0.0) == 0.0
    assert mf_lde(g, m, 0.5, 0.3, 0.3) == 0.0


def test_lte_linearisation_error_halves(complete5):
    g, m = complete5
    slope = float(np.mean(mf_derivative(g, m, 0.5)))
    errors = [abs(mf_lte(g, m, 0.5, d) / d - slope) for d in (0.1, 0.05)]
    assert 1.5 <= errors[0] / errors[1] <= 2.5
    assert mf_lte_linear(g, m, 0.5, 0.1) == pytest.approx(0.1 * slope)


def test_lde_antisymmetric(complete5):
    g, m = complete5
    assert mf_lde(g, m, 0.5, 0.7, 0.3, workers=2) == pytest.approx(-mf_lde(g, m, 0.5, 0.3, 0.7), abs=1e-9)


def test_directions(caplog):
    assert direction("ones", [0.2, 0.4]).tolist() == [1.0, 1.0]
    v = direction("proportional", [0.3, 0.4])
    assert np.linalg.norm(v) == pytest.approx(np.sqrt(2))
    with pytest.raises(ValidationError):
        direction("diagonal", [0.5])
    g = complete_graph(2)
    m = build_activation(affine_spec(), g)
    mf_derivative(g, m, 0.5, v=[1.0, 0.0])
    assert "differs from sqrt(n)" in caplog.text


def test_solution_file(tmp_path, complete5):
    g, m = complete5
    sol = mf_fixed_point(g, m, 0.5)
    back = MeanFieldSolution.load(sol.save(tmp_path / "mf.json"))
    assert np.array_equal(back.P_star, sol.P_star)
    assert back.graph_hash == g.fingerprint
    mf_jacobian_parts(g, m, back, 0.5)


def test_bounds(complete5):
    g, m = complete5
    report = assumption_constants(m, g)
    bounds = mean_field_bounds(report, g.n)
    assert bounds.w_de1 == pytest.approx(np.sqrt(4) * 0.44 / (2 * 0.56))
    big = complete_graph(9)
    assert mean_field_bounds(assumption_constants(build_activation(VIOLATING, big), big), 9) is None


def test_logistic_slope_term_matches_step_difference():
    g = complete_graph(4)
    low = {"theta0": -1.0, "thetaz": 0.3}
    high = {"theta0": -0.4, "thetaz": 0.2}
    spec = {"family": "logistic", "curves": {"00": low, "01": {"theta0": -0.7, "thetaz": 0.4}, "10": high, "11": high}}
    m = build_activation(spec, g)
    sol = mf_fixed_point(g, m, 0.5, tol=1e-14)
    D, W, _ = mf_jacobian_parts(g, m, sol, 0.5)
    h = 1e-5
    for i in range(g.n):
        j = (i + 1) % g.n
        bump = np.zeros(g.n)
        bump[j] = h
        numeric = (mf_step(g, m, 0.5, sol.P_star + bump)[i] - mf_step(g, m, 0.5, sol.P_star - bump)[i]) / (2 * h)
        assert D[i] == pytest.approx(numeric, abs=1e-5)
        bump = np.zeros(g.n)
        bump[i] = h
        numeric = (mf_step(g, m, 0.5, sol.P_star + bump)[i] - mf_step(g, m, 0.5, sol.P_star - bump)[i]) / (2 * h)
        assert W[i] == pytest.approx(numeric, abs=1e-5)


def test_derivative_finite_difference_error_is_second_order(complete5):
    g, m = complete5
    exact = mf_derivative(g, m, 0.5)

    def error(h):
        up = mf_fixed_point(g, m, 0.5 + h, tol=1e-14).P_star
        down = mf_fixed_point(g, m, 0.5 - h, tol=1e-14).P_star
        return np.abs((up - down) / (2 * h) - exact).max()

    assert 3.5 <= error(0.04) / error(0.02) <= 4.5


def test_lde_without_neighbours_is_the_scalar_closed_form():
    g = empty_graph(3)
    spec = {
        "family": "affine",
        "decomposition": {"a": 0.1, "b": 0.2, "c": 0.3, "d": 0.1},
        "units": {"1": {"decomposition": {"a": 0.05, "b": 0.3, "c": 0.2, "d": 0.2}},
                  "2": {"decomposition": {"a": 0.2, "b": 0.1, "c": 0.4, "d": -0.1}}},
    }
    m = build_activation(spec, g)
    a = np.array([0.1, 0.05, 0.2])
    b = np.array([0.2, 0.3, 0.1])
    c = np.array([0.3, 0.2, 0.4])
    d = np.array([0.1, 0.2, -0.1])

    def stationary(gamma):
        return (a + b * gamma) / (1 - c - d * gamma)

    expected = float(np.mean(stationary(0.7) - stationary(0.4)))
    assert mf_lde(g, m, 0.5, 0.7, 0.4) == pytest.approx(expected, abs=1e-9)
