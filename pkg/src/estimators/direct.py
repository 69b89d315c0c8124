"""Short-term and long-term direct effect estimators."""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from ..errors import DegenerateDenominator, PolicyOutOfRange, TimeOutOfRange
from ..simulate import Trajectory, as_policy
from .cells import abcd_from_cells, cell_table

logger = logging.getLogger(__name__)

DENOMINATOR_THRESHOLD = 1e-3


def _policy(traj: Trajectory, pi) -> np.ndarray:
    return as_policy(traj.policy if pi is None else pi, traj.n).values


def sde_ipw(traj: Trajectory, t: int, pi=None) -> float:
    """(1/n) sum_i Y_i,t+1 (W_it / pi_i - (1 - W_it) / (1 - pi_i))."""
    if not 0 <= t < traj.T:
        raise TimeOutOfRange(t, traj.T)
    p = _policy(traj, pi)
    w = traj.W[t].astype(float)
    weights = w / p - (1.0 - w) / (1.0 - p)
    return float(np.mean(traj.Y[t + 1] * weights))


def sde_ipw_avg(traj: Trajectory, pi=None, start: int = 0, stop: Optional[int] = None) -> float:
    """IPW estimate averaged over decision points start..stop-1."""
    stop = traj.T if stop is None else stop
    if not 0 <= start < stop <= traj.T:
        raise TimeOutOfRange(start if not 0 <= start < traj.T else stop - 1, traj.T)
    p = _policy(traj, pi)
    w = traj.W[start:stop].astype(float)
    weights = w / p - (1.0 - w) / (1.0 - p)
    return float(np.mean(traj.Y[start + 1:stop + 1] * weights))


def _check_gamma(gamma: float) -> None:
    if not 0.0 < gamma < 1.0:
        raise PolicyOutOfRange(details=f"gamma={gamma}")


def lde_from_moments(a, b, c, d, gamma1: float, gamma2: float,
                     threshold: float = DENOMINATOR_THRESHOLD) -> float:
    """(1/n) sum_i [(a + b g1)/(1 - c - d g1) - (a + b g2)/(1 - c - d g2)]."""
    _check_gamma(gamma1)
    _check_gamma(gamma2)
    a, b, c, d = (np.asarray(x, dtype=float) for x in (a, b, c, d))
    den1 = 1.0 - c - d * gamma1
    den2 = 1.0 - c - d * gamma2
    small = np.flatnonzero((np.abs(den1) < threshold) | (np.abs(den2) < threshold))
    if small.size:
        raise DegenerateDenominator(small.tolist(), threshold)
    return float(np.mean((a + b * gamma1) / den1 - (a + b * gamma2) / den2))


def lde_hat(traj: Trajectory, gamma1: float, gamma2: float,
            threshold: float = DENOMINATOR_THRESHOLD) -> float:
    """Plug-in long-term direct effect from the trajectory's cell means."""
    a, b, c, d = abcd_from_cells(cell_table(traj).means())
    return lde_from_moments(a, b, c, d, gamma1, gamma2, threshold)
