"""Within-cell derivative estimates and the long-term total effect estimator."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as splinalg

from ..errors import EmptyCell, NoConvergence, ValidationError, validate_unit_vector
from ..graph import InterferenceGraph
from ..meanfield import direction
from ..simulate import Trajectory, as_policy
from .cells import abcd_from_cells, cell_table, phat_all

logger = logging.getLogger(__name__)

DEFAULT_ETA = 0.05
DEFAULT_KAPPA = 0.05
GUARDS = ("abs", "d_hat")
NEUMANN_TOL = 1e-10
NEUMANN_MAX_ITER = 100_000
# decision points per accumulation block
_TIME_BLOCK = 8192


def default_delta_T(T: int) -> float:
    """T^(-1/4)."""
    return float(T) ** -0.25 if T > 0 else 1.0


def _check_graph(traj: Trajectory, g: InterferenceGraph) -> None:
    if traj.n != g.n or (traj.graph_hash and traj.graph_hash != g.fingerprint):
        raise ValidationError("Trajectory was not simulated on this graph",
                              f"trajectory graph {traj.graph_hash[:12] or '?'}, given {g.fingerprint[:12]}")


@dataclass(frozen=True, eq=False)
class SlopeTable:
    """values[i, y, w] = fprime estimate; floored marks cells where the floor set the denominator."""

    values: np.ndarray
    floored: np.ndarray
    counts: np.ndarray
    delta_T: float


def _cell_moments(traj: Trajectory) -> np.ndarray:
    """out[i, y, w] = (count, sum Y', sum Z, sum Y'Z, sum Z^2) over visits to the cell."""
    out = np.zeros((traj.n, 2, 2, 5), dtype=np.int64)
    for start in range(0, traj.T, _TIME_BLOCK):
        stop = min(traj.T, start + _TIME_BLOCK)
        now = traj.Y[start:stop]
        nxt = traj.Y[start + 1:stop + 1].astype(np.int64)
        z = traj.Z[start:stop].astype(np.int64)
        w_block = traj.W[start:stop]
        for y in (0, 1):
            for w in (0, 1):
                mask = ((now == y) & (w_block == w)).astype(np.int64)
                my = mask * nxt
                mz = mask * z
                out[:, y, w, 0] += mask.sum(axis=0)
                out[:, y, w, 1] += my.sum(axis=0)
                out[:, y, w, 2] += mz.sum(axis=0)
                out[:, y, w, 3] += (my * z).sum(axis=0)
                out[:, y, w, 4] += (mz * z).sum(axis=0)
    return out


def fprime_table(traj: Trajectory, g: InterferenceGraph, delta_T: Optional[float] = None) -> SlopeTable:
    """Within-cell regression slope of Y_i,t+1 on Z_it for every unit and cell.

    The denominator is max(D_n T delta_T, sum over the cell of (Z_it - Zbar)^2).
    """
    _check_graph(traj, g)
    delta_T = default_delta_T(traj.T) if delta_T is None else float(delta_T)
    if delta_T <= 0:
        raise ValidationError(f"delta_T must be positive, got {delta_T}")
    floor = g.max_degree * traj.T * delta_T

    sums = _cell_moments(traj)
    values = np.zeros((traj.n, 2, 2))
    floored = np.zeros((traj.n, 2, 2), dtype=bool)
    counts = np.zeros((traj.n, 2, 2), dtype=np.int64)
    for y in (0, 1):
        for w in (0, 1):
            cnt, s_y, s_z, s_yz, s_zz = sums[:, y, w, :].T
            safe = np.maximum(cnt, 1)
            # integer cross-products before the division keep the centring exact
            num = (cnt * s_yz - s_y * s_z) / safe
            ss = (cnt * s_zz - s_z * s_z) / safe
            denom = np.maximum(floor, ss)
            with np.errstate(invalid="ignore", divide="ignore"):
                values[:, y, w] = np.where(denom > 0, num / denom, 0.0)
            floored[:, y, w] = floor >= ss
            counts[:, y, w] = cnt
    return SlopeTable(values=values, floored=floored, counts=counts, delta_T=delta_T)


def fprime_hat(traj: Trajectory, g: InterferenceGraph, i: int, y: int, w: int,
               delta_T: Optional[float] = None) -> float:
    table = fprime_table(traj, g, delta_T)
    if table.counts[i, y, w] == 0:
        raise EmptyCell([(int(i), int(y), int(w))])
    return float(table.values[i, y, w])


@dataclass(frozen=True, eq=False)
class LteSystem:
    """The guarded linear system M x = u + (D A + W) x and its solution."""

    D_hat: np.ndarray
    omega: np.ndarray
    u: np.ndarray
    M: np.ndarray
    x: np.ndarray
    clipped: int
    guarded: int
    iterations: int
    method: str

    def effect(self, delta: float) -> float:
        return float(delta) * float(np.mean(self.x))


def solve_lte_system(g: InterferenceGraph, a, b, c, d, P, fprime, pi, v,
                     eta: float = DEFAULT_ETA, kappa: float = DEFAULT_KAPPA,
                     m_guard: str = "abs") -> LteSystem:
    """Assemble and solve the guarded system from moment estimates.

    Args:
        g: Interference graph (adjacency and D_n).
        a, b, c, d: Per-unit plug-in decomposition moments.
        P: Per-unit outcome averages.
        fprime: (n, 2, 2) derivative estimates indexed [unit, y, w].
        pi: Treatment probabilities.
        v: Direction vector.
        eta: Guard slack in (0, 1).
        kappa: Cap margin on omega, in (0, 1).
        m_guard: ``abs`` guards with |D_hat|, ``d_hat`` with the interaction term d_hat.
    """
    if not 0.0 < eta < 1.0 or not 0.0 < kappa < 1.0:
        raise ValidationError(f"eta and kappa must lie in (0, 1), got eta={eta}, kappa={kappa}")
    if m_guard not in GUARDS:
        raise ValidationError(f"Unknown m_guard '{m_guard}'", f"choose {' or '.join(GUARDS)}")
    n = g.n
    p = as_policy(pi, n).values
    v = validate_unit_vector(v, n, "direction")
    a, b, c, d, P = (validate_unit_vector(x, n, name) for x, name in
                     ((a, "a"), (b, "b"), (c, "c"), (d, "d"), (P, "P")))
    fp = np.asarray(fprime, dtype=float)

    D_hat = ((1 - p) * (1 - P) * fp[:, 0, 0] + p * (1 - P) * fp[:, 0, 1]
             + P * (1 - p) * fp[:, 1, 0] + P * p * fp[:, 1, 1])
    raw_omega = c + d * p
    omega = np.minimum(1.0 - kappa, raw_omega)
    u = (b + d * P) * v
    guard = np.abs(D_hat) if m_guard == "abs" else d
    M = np.maximum(1.0, guard * g.max_degree / (1.0 - eta) + omega)

    A = g.adjacency
    bound = float(((np.abs(D_hat) * g.degrees + np.abs(omega)) / M).max()) if n else 0.0
    if bound < 1.0:
        x = u / M
        change = math.inf
        for k in range(1, NEUMANN_MAX_ITER + 1):
            nxt = (u + D_hat * (A @ x) + omega * x) / M
            change = float(np.abs(nxt - x).max())
            x = nxt
            if change <= NEUMANN_TOL:
                break
        else:
            raise NoConvergence("guarded Neumann solve", NEUMANN_MAX_ITER, change)
        iterations, method = k, "neumann"
    else:
        logger.warning("guarded system is not a contraction (row bound %.3g); using a sparse direct solve", bound)
        system = sparse.diags(M - omega) - sparse.diags(D_hat) @ A
        x = np.asarray(splinalg.spsolve(system.tocsc(), u), dtype=float).reshape(-1)
        if not np.all(np.isfinite(x)):
            raise NoConvergence("guarded direct solve", 1, float("nan"))
        iterations, method = 1, "direct"

    return LteSystem(
        D_hat=D_hat, omega=omega, u=u, M=M, x=x,
        clipped=int((raw_omega > 1.0 - kappa).sum()),
        guarded=int((M > 1.0).sum()),
        iterations=iterations,
        method=method,
    )


def lte_from_moments(g: InterferenceGraph, a, b, c, d, P, fprime, pi, delta: float, v,
                     eta: float = DEFAULT_ETA, kappa: float = DEFAULT_KAPPA,
                     m_guard: str = "abs") -> float:
    """(delta / n) 1^T (M - D A - W)^-1 u from moment estimates."""
    return solve_lte_system(g, a, b, c, d, P, fprime, pi, v, eta, kappa, m_guard).effect(delta)


def lte_system_from_trajectory(traj: Trajectory, g: InterferenceGraph, pi=None, v="ones",
                               delta_T: Optional[float] = None, eta: float = DEFAULT_ETA,
                               kappa: float = DEFAULT_KAPPA,
                               m_guard: str = "abs") -> tuple[LteSystem, "SlopeTable"]:
    _check_graph(traj, g)
    policy = as_policy(traj.policy if pi is None else pi, g.n)
    vec = direction(v, policy) if isinstance(v, str) else v
    a, b, c, d = abcd_from_cells(cell_table(traj).means())
    slopes = fprime_table(traj, g, delta_T)
    system = solve_lte_system(g, a, b, c, d, phat_all(traj), slopes.values, policy, vec, eta, kappa, m_guard)
    return system, slopes


def lte_hat(traj: Trajectory, g: InterferenceGraph, pi=None, delta: float = 0.1, v="ones",
            delta_T: Optional[float] = None, eta: float = DEFAULT_ETA, kappa: float = DEFAULT_KAPPA,
            m_guard: str = "abs") -> float:
    """Long-term total effect of moving the policy from pi to pi + delta v."""
    system, _ = lte_system_from_trajectory(traj, g, pi, v, delta_T, eta, kappa, m_guard)
    return system.effect(delta)
