"""Exact stationary distribution of the treatment-marginalised 2^n-state chain.

States are indexed by x = sum_i x_i 2^i. Given the current state y, next-step
outcomes are independent Bernoulli(p_i(y)), so the row of the transition
matrix for y is the Kronecker product of the unit factors [1 - p_i, p_i].
Rows are built block by block on every sweep; the full 2^n x 2^n matrix is
never held in memory.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from ..activation import ActivationModel
from ..config import ORACLE_HARD_MAX, get_config
from ..errors import LengthMismatch, NoConvergence, TooLarge, ValidationError
from ..graph import InterferenceGraph
from ..simulate import PolicyLike, as_policy
from ..utils import ensure_directory

logger = logging.getLogger(__name__)

# oracle sizes above this get a memory warning
WARN_ABOVE = 12
# transition-row entries built per block
_BLOCK_CELLS = 1 << 22


@dataclass(frozen=True, eq=False)
class ExactDistribution:
    """Stationary law over the 2^n binary states."""

    n: int
    probs: np.ndarray
    residual: float
    iterations: int = 0
    policy: Optional[np.ndarray] = None
    graph_hash: str = ""
    model_hash: str = ""

    def __post_init__(self):
        if self.probs.shape != (1 << self.n,):
            raise LengthMismatch("distribution", int(self.probs.size), 1 << self.n)

    @property
    def states(self) -> np.ndarray:
        return state_bits(self.n)


def state_bits(n: int) -> np.ndarray:
    """(2^n, n) matrix whose row x holds the bits of x, unit i at bit i."""
    x = np.arange(1 << n, dtype=np.int64)[:, None]
    return ((x >> np.arange(n, dtype=np.int64)[None, :]) & 1).astype(np.uint8)


def check_oracle_size(n: int, cap: Optional[int]) -> int:
    cap = get_config().oracle_cap if cap is None else int(cap)
    cap = min(cap, ORACLE_HARD_MAX)
    if n > cap:
        raise TooLarge(n, cap)
    if n > WARN_ABOVE:
        logger.warning("exact oracle with n=%d: %d states, each sweep touches 4^n entries", n, 1 << n)
    return cap


def _next_probs(g: InterferenceGraph, m: ActivationModel, policy: np.ndarray, bits: np.ndarray) -> np.ndarray:
    """p[s, i] = pi_i f_i(y_i, 1, z_i) + (1 - pi_i) f_i(y_i, 0, z_i) for each row state."""
    z = g.neighbor_sums(bits)
    units = m.units[None, :]
    y = bits.astype(np.int64)
    treated = m.prob(units, y, 1, z)
    control = m.prob(units, y, 0, z)
    return policy * treated + (1.0 - policy) * control


def marginal_transition_prob(g: InterferenceGraph, m: ActivationModel, pi: PolicyLike, y) -> np.ndarray:
    """Chance each unit is 1 next step given state y, with treatments marginalised out."""
    policy = as_policy(pi, g.n).values
    y = np.asarray(y).astype(np.uint8)
    if y.shape != (g.n,):
        raise LengthMismatch("state", int(y.size), g.n)
    return _next_probs(g, m, policy, y[None, :])[0]


def _kron_rows(p: np.ndarray) -> np.ndarray:
    """Transition rows for a block of source states from their (B, n) next-step probabilities."""
    rows = np.ones((p.shape[0], 1))
    for i in range(p.shape[1] - 1, -1, -1):
        factor = np.stack([1.0 - p[:, i], p[:, i]], axis=1)
        rows = (rows[:, :, None] * factor[:, None, :]).reshape(p.shape[0], -1)
    return rows


def _apply(mu: np.ndarray, p: np.ndarray, block: int) -> np.ndarray:
    out = np.zeros_like(mu)
    for start in range(0, mu.size, block):
        stop = min(mu.size, start + block)
        weights = mu[start:stop]
        if not weights.any():
            continue
        out += weights @ _kron_rows(p[start:stop])
    return out


def exact_stationary(g: InterferenceGraph, m: ActivationModel, pi: PolicyLike,
                     tol: Optional[float] = None, max_iter: Optional[int] = None,
                     cap: Optional[int] = None, warm_start: Optional[np.ndarray] = None) -> ExactDistribution:
    """Power iteration to the unique stationary law.

    Args:
        g: Interference graph with at most ``cap`` units.
        m: Activation model.
        pi: Treatment probabilities.
        tol: Max-norm change that stops the iteration.
        max_iter: Sweep budget.
        cap: Largest unit count accepted, the configured oracle cap by default.
        warm_start: Initial distribution, uniform by default.
    """
    n = g.n
    check_oracle_size(n, cap)
    config = get_config()
    tol = config.oracle_tol if tol is None else float(tol)
    max_iter = config.oracle_max_iter if max_iter is None else int(max_iter)
    policy = as_policy(pi, n).values

    bits = state_bits(n)
    p = _next_probs(g, m, policy, bits)
    size = 1 << n
    block = max(1, _BLOCK_CELLS // size)

    if warm_start is None:
        mu = np.full(size, 1.0 / size)
    else:
        mu = np.array(warm_start, dtype=float)
        if mu.shape != (size,):
            raise LengthMismatch("warm start", int(mu.size), size)

    change = math.inf
    for sweep in range(1, max_iter + 1):
        nxt = _apply(mu, p, block)
        nxt /= nxt.sum()
        change = float(np.abs(nxt - mu).max())
        mu = nxt
        if change <= tol:
            break
    else:
        logger.warning("power iteration stopped at %d sweeps, change %.3e", max_iter, change)
        raise NoConvergence("exact power iteration", max_iter, change)

    residual = float(np.abs(_apply(mu, p, block) - mu).max())
    return ExactDistribution(n=n, probs=mu, residual=residual, iterations=sweep, policy=policy.copy(),
                             graph_hash=g.fingerprint, model_hash=m.fingerprint)


def exact_mean(dist: ExactDistribution) -> np.ndarray:
    """E[Y_i] under the distribution."""
    return dist.probs @ dist.states.astype(float)


def write_distribution_csv(dist: ExactDistribution, path: Path) -> Path:
    """CSV with columns state (bitmask) and probability."""
    path = Path(path)
    ensure_directory(path.parent)
    frame = pd.DataFrame({"state": np.arange(dist.probs.size), "probability": dist.probs})
    frame.to_csv(path, index=False, float_format="%.17g")
    return path


def read_distribution_csv(path: Path) -> ExactDistribution:
    frame = pd.read_csv(Path(path))
    size = len(frame)
    n = size.bit_length() - 1
    if size == 0 or 1 << n != size:
        raise ValidationError(f"Distribution file {path} does not hold 2^n rows", f"got {size}")
    probs = np.zeros(size)
    probs[frame["state"].to_numpy(dtype=np.int64)] = frame["probability"].to_numpy(dtype=float)
    return ExactDistribution(n=n, probs=probs, residual=float("nan"))
