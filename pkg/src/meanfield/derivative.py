"""Policy derivative of the mean-field fixed point and mean-field effect surrogates."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Optional, Union

import numpy as np

from ..activation import ActivationModel, AssumptionReport
from ..config import get_config
from ..errors import NoConvergence, StaleSolution, ValidationError, validate_unit_vector
from ..graph import InterferenceGraph
from ..simulate import PolicyLike, PolicyVector, as_policy
from .solver import MeanFieldSolution, contraction_check, default_max_iter, mf_fixed_point

logger = logging.getLogger(__name__)

NEUMANN_TOL = 1e-10
RESIDUAL_TOL = 1e-9

Direction = Union[str, np.ndarray, list, tuple, float]


def direction(kind: str, pi: PolicyLike, n: Optional[int] = None) -> np.ndarray:
    """Named direction vectors: ``ones`` or ``proportional`` (pi scaled to norm sqrt(n))."""
    values = np.asarray(pi.values if isinstance(pi, PolicyVector) else pi, dtype=float)
    if n is not None:
        values = validate_unit_vector(values, n, "policy")
    size = values.size
    if kind == "ones":
        return np.ones(size)
    if kind == "proportional":
        return values * math.sqrt(size) / float(np.linalg.norm(values))
    raise ValidationError(f"Unknown direction '{kind}'", "choose ones or proportional")


def resolve_direction(v: Direction, pi: PolicyVector) -> np.ndarray:
    """A direction name or explicit vector, with its norm checked against sqrt(n)."""
    vec = direction(v, pi) if isinstance(v, str) else validate_unit_vector(v, pi.n, "direction")
    norm = float(np.linalg.norm(vec))
    target = math.sqrt(pi.n)
    if not math.isclose(norm, target, rel_tol=1e-9):
        logger.warning("direction norm %.6g differs from sqrt(n)=%.6g", norm, target)
    return vec


def _check_fresh(sol: MeanFieldSolution, g: InterferenceGraph, m: ActivationModel, policy: PolicyVector) -> None:
    if sol.graph_hash != g.fingerprint:
        raise StaleSolution("graph")
    if sol.model_hash != m.fingerprint:
        raise StaleSolution("activation model")
    if sol.policy.shape != policy.values.shape or not np.array_equal(sol.policy, policy.values):
        raise StaleSolution("policy")


def mf_jacobian_parts(g: InterferenceGraph, m: ActivationModel, sol: MeanFieldSolution, pi: PolicyLike,
                      v: Direction = "ones") -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(D_diag, W_diag, u) of the linear system (I - D A - W) p = u at the fixed point."""
    policy = as_policy(pi, g.n)
    _check_fresh(sol, g, m, policy)
    vec = resolve_direction(v, policy)
    P, Q, p = sol.P_star, sol.Q_star, policy.values
    _, b, c, d = m.abcd(m.units, Q)
    D_diag = m.bilinear_deriv(P, p, Q)
    W_diag = c + d * p
    u = vec * (b + d * P)
    return D_diag, W_diag, u


def solve_neumann(g: InterferenceGraph, D_diag: np.ndarray, W_diag: np.ndarray, u: np.ndarray,
                  tol: float = NEUMANN_TOL, max_iter: int = 10_000) -> tuple[np.ndarray, int]:
    """Iterate p <- u + D (A p) + W p until the max-norm change is <= tol."""
    A = g.adjacency
    p = u.copy()
    change = math.inf
    for k in range(1, max_iter + 1):
        nxt = u + D_diag * (A @ p) + W_diag * p
        change = float(np.abs(nxt - p).max()) if p.size else 0.0
        p = nxt
        if change <= tol:
            break
    else:
        raise NoConvergence("Neumann solve", max_iter, change)

    residual = float(np.abs(p - D_diag * (A @ p) - W_diag * p - u).max()) if p.size else 0.0
    if residual > RESIDUAL_TOL:
        raise NoConvergence("Neumann solve", k, residual)
    return p, k


def mf_derivative(g: InterferenceGraph, m: ActivationModel, pi: PolicyLike, v: Direction = "ones",
                  sol: Optional[MeanFieldSolution] = None, on_violation: str = "raise",
                  report: Optional[AssumptionReport] = None) -> np.ndarray:
    """p* = grad_pi P*(pi)^T v for every unit."""
    policy = as_policy(pi, g.n)
    report = contraction_check(g, m, on_violation, report)
    if sol is None:
        sol = mf_fixed_point(g, m, policy, on_violation=on_violation, report=report)
    D_diag, W_diag, u = mf_jacobian_parts(g, m, sol, policy, v)
    max_iter = default_max_iter(report.C, NEUMANN_TOL, g.n)
    p, iterations = solve_neumann(g, D_diag, W_diag, u, max_iter=max_iter)
    logger.debug("derivative solve converged in %d iterations", iterations)
    return p


def mf_lte(g: InterferenceGraph, m: ActivationModel, pi: PolicyLike, delta: float,
           v: Direction = "ones", sol: Optional[MeanFieldSolution] = None,
           on_violation: str = "raise") -> float:
    """(1/n) sum_i [P*_i(pi + delta v) - P*_i(pi)] from two fixed-point solves."""
    policy = as_policy(pi, g.n)
    vec = resolve_direction(v, policy)
    shifted = policy.shifted(delta, vec)
    if delta == 0:
        return 0.0
    report = contraction_check(g, m, on_violation)
    if sol is None:
        sol = mf_fixed_point(g, m, policy, on_violation=on_violation, report=report)
    moved = mf_fixed_point(g, m, shifted, P0=sol.P_star, on_violation=on_violation, report=report)
    return float(np.mean(moved.P_star - sol.P_star))


def mf_lte_linear(g: InterferenceGraph, m: ActivationModel, pi: PolicyLike, delta: float,
                  v: Direction = "ones", sol: Optional[MeanFieldSolution] = None,
                  on_violation: str = "raise") -> float:
    """First-order approximation (delta / n) 1^T p* of mf_lte."""
    p = mf_derivative(g, m, pi, v, sol=sol, on_violation=on_violation)
    return float(delta) * float(np.mean(p))


def mf_lde(g: InterferenceGraph, m: ActivationModel, pi: PolicyLike, gamma1: float, gamma2: float,
           sol: Optional[MeanFieldSolution] = None, on_violation: str = "raise",
           workers: Optional[int] = None) -> float:
    """(1/n) sum_i [P*_i(pi_i = gamma1) - P*_i(pi_i = gamma2)], other units held at pi.

    The 2n tilted fixed points are warm-started from P*(pi) and solved on a
    thread pool; results are collected by unit before averaging.
    """
    policy = as_policy(pi, g.n)
    tilts = [(i, policy.with_unit(i, gamma1), policy.with_unit(i, gamma2)) for i in range(g.n)]
    if gamma1 == gamma2:
        return 0.0

    report = contraction_check(g, m, on_violation)
    if sol is None:
        sol = mf_fixed_point(g, m, policy, on_violation=on_violation, report=report)
    workers = workers or get_config().workers

    def unit_effect(i: int, high: PolicyVector, low: PolicyVector) -> float:
        up = mf_fixed_point(g, m, high, P0=sol.P_star, on_violation=on_violation, report=report)
        down = mf_fixed_point(g, m, low, P0=sol.P_star, on_violation=on_violation, report=report)
        return float(up.P_star[i] - down.P_star[i])

    effects = np.zeros(g.n)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(unit_effect, i, high, low): i for i, high, low in tilts}
        for future in as_completed(futures):
            effects[futures[future]] = future.result()
    return float(effects.mean())
