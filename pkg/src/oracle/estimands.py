"""Exact values of the short-term, long-term direct and long-term total effects."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Optional

import numpy as np

from ..activation import ActivationModel
from ..config import get_config
from ..errors import LengthMismatch
from ..estimators import lde_from_moments
from ..graph import InterferenceGraph
from ..simulate import PolicyLike, as_policy
from .chain import ExactDistribution, check_oracle_size, exact_mean, exact_stationary

logger = logging.getLogger(__name__)


def _check_dist(dist: ExactDistribution, g: InterferenceGraph) -> None:
    if dist.n != g.n:
        raise LengthMismatch("distribution units", dist.n, g.n)


def exact_sde(g: InterferenceGraph, m: ActivationModel, y) -> float:
    """(1/n) sum_i [f_i(y_i, 1, z_i) - f_i(y_i, 0, z_i)] at the state y."""
    y = np.asarray(y).astype(np.int64)
    if y.shape != (g.n,):
        raise LengthMismatch("state", int(y.size), g.n)
    z = g.neighbor_sums(y)
    return float(np.mean(m.prob(m.units, y, 1, z) - m.prob(m.units, y, 0, z)))


def exact_sde_states(g: InterferenceGraph, m: ActivationModel, states, block: int = 4096) -> np.ndarray:
    """exact_sde for every row of a (k, n) array of states."""
    states = np.asarray(states).astype(np.int64)
    if states.ndim != 2 or states.shape[1] != g.n:
        raise LengthMismatch("state columns", int(states.shape[-1]), g.n)
    units = m.units[None, :]
    out = np.empty(states.shape[0])
    for start in range(0, states.shape[0], block):
        rows = states[start:start + block]
        z = g.neighbor_sums(rows)
        out[start:start + block] = (m.prob(units, rows, 1, z) - m.prob(units, rows, 0, z)).mean(axis=1)
    return out


def exact_expected_sde(dist: ExactDistribution, g: InterferenceGraph, m: ActivationModel) -> float:
    """Stationary expectation of the per-state SDE."""
    _check_dist(dist, g)
    bits = dist.states.astype(np.int64)
    z = g.neighbor_sums(bits)
    units = m.units[None, :]
    per_state = (m.prob(units, bits, 1, z) - m.prob(units, bits, 0, z)).mean(axis=1)
    return float(dist.probs @ per_state)


def exact_cell_means(dist: ExactDistribution, g: InterferenceGraph, m: ActivationModel) -> np.ndarray:
    """out[i, y, w] = E[f_i(y, w, Z_i) | Y_i = y]; NaN where P(Y_i = y) = 0."""
    _check_dist(dist, g)
    bits = dist.states.astype(np.int64)
    z = g.neighbor_sums(bits)
    units = m.units[None, :]
    out = np.full((g.n, 2, 2), np.nan)
    for y in (0, 1):
        weights = dist.probs[:, None] * (bits == y)
        mass = weights.sum(axis=0)
        for w in (0, 1):
            total = (weights * m.prob(units, y, w, z)).sum(axis=0)
            with np.errstate(invalid="ignore", divide="ignore"):
                out[:, y, w] = np.where(mass > 0, total / mass, np.nan)
    return out


def exact_abcd_means(dist: ExactDistribution, g: InterferenceGraph,
                     m: ActivationModel) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Per-unit stationary means of a_i(Z_i), b_i(Z_i), c_i(Z_i) and d_i(Z_i)."""
    _check_dist(dist, g)
    z = g.neighbor_sums(dist.states.astype(np.int64))
    parts = m.abcd(m.units[None, :], z)
    return tuple(dist.probs @ part for part in parts)


def exact_lde_characterization(dist: ExactDistribution, g: InterferenceGraph, m: ActivationModel,
                               gamma1: float, gamma2: float) -> float:
    """The ratio formula for the LDE evaluated at exact stationary moments."""
    a, b, c, d = exact_abcd_means(dist, g, m)
    return lde_from_moments(a, b, c, d, gamma1, gamma2)


def exact_lte(g: InterferenceGraph, m: ActivationModel, pi1: PolicyLike, pi2: PolicyLike,
              cap: Optional[int] = None) -> float:
    """(1/n) sum_i [E_mu(pi1) Y_i - E_mu(pi2) Y_i]."""
    p1 = as_policy(pi1, g.n)
    p2 = as_policy(pi2, g.n)
    if p1.equals(p2):
        check_oracle_size(g.n, cap)
        return 0.0
    first = exact_stationary(g, m, p1, cap=cap)
    second = exact_stationary(g, m, p2, cap=cap, warm_start=first.probs)
    return float(np.mean(exact_mean(first) - exact_mean(second)))


def exact_lde(g: InterferenceGraph, m: ActivationModel, pi: PolicyLike, gamma1: float, gamma2: float,
              cap: Optional[int] = None, base: Optional[ExactDistribution] = None,
              workers: Optional[int] = None) -> float:
    """(1/n) sum_i [E_mu(pi_i = gamma1) Y_i - E_mu(pi_i = gamma2) Y_i] from 2n tilted solves."""
    policy = as_policy(pi, g.n)
    tilts = [(i, policy.with_unit(i, gamma1), policy.with_unit(i, gamma2)) for i in range(g.n)]
    check_oracle_size(g.n, cap)
    if gamma1 == gamma2:
        return 0.0
    if base is None:
        base = exact_stationary(g, m, policy, cap=cap)
    workers = workers or get_config().workers

    def unit_effect(i, high, low) -> float:
        up = exact_stationary(g, m, high, cap=cap, warm_start=base.probs)
        down = exact_stationary(g, m, low, cap=cap, warm_start=base.probs)
        return float(exact_mean(up)[i] - exact_mean(down)[i])

    effects = np.zeros(g.n)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(unit_effect, i, high, low): i for i, high, low in tilts}
        for future in as_completed(futures):
            effects[futures[future]] = future.result()
    logger.debug("exact LDE over %d tilted pairs", g.n)
    return float(effects.mean())
