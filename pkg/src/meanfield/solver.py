"""Deterministic mean-field system and its fixed point."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from ..activation import ActivationModel, AssumptionReport, assumption_constants
from ..config import get_config
from ..errors import ContractionViolation, LengthMismatch, NoConvergence, ValidationError
from ..graph import InterferenceGraph
from ..simulate import PolicyLike, as_policy
from ..utils import read_json, write_json

logger = logging.getLogger(__name__)

FALLBACK_MAX_ITER = 10_000


@dataclass(frozen=True, eq=False)
class MeanFieldSolution:
    """Fixed point P* of the mean-field map, with the hashes of its inputs."""

    P_star: np.ndarray
    Q_star: np.ndarray
    iterations: int
    residual: float
    policy: np.ndarray
    graph_hash: str
    model_hash: str

    @property
    def n(self) -> int:
        return int(self.P_star.size)

    def to_dict(self) -> dict:
        return {
            "P_star": self.P_star.tolist(),
            "Q_star": self.Q_star.tolist(),
            "iterations": self.iterations,
            "residual": self.residual,
            "policy": self.policy.tolist(),
            "graph_hash": self.graph_hash,
            "model_hash": self.model_hash,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "MeanFieldSolution":
        return cls(
            P_star=np.asarray(payload["P_star"], dtype=float),
            Q_star=np.asarray(payload["Q_star"], dtype=float),
            iterations=int(payload["iterations"]),
            residual=float(payload["residual"]),
            policy=np.asarray(payload["policy"], dtype=float),
            graph_hash=str(payload["graph_hash"]),
            model_hash=str(payload["model_hash"]),
        )

    def save(self, path: Path) -> Path:
        return write_json(Path(path), self.to_dict())

    @classmethod
    def load(cls, path: Path) -> "MeanFieldSolution":
        payload = read_json(Path(path))
        if payload is None:
            raise ValidationError(f"Cannot read mean-field solution {path}")
        return cls.from_dict(payload)


def mf_step(g: InterferenceGraph, m: ActivationModel, pi: PolicyLike, P) -> np.ndarray:
    """One application of P -> a(Q) + b(Q) pi + c(Q) P + d(Q) pi P with Q = A P."""
    policy = as_policy(pi, g.n).values
    P = np.asarray(P, dtype=float)
    if P.shape != (g.n,):
        raise LengthMismatch("probability vector", int(P.size), g.n)
    return _step(g, m, policy, P)


def _step(g: InterferenceGraph, m: ActivationModel, policy: np.ndarray, P: np.ndarray) -> np.ndarray:
    return m.bilinear(P, policy, g.neighbor_sums(P))


def default_max_iter(contraction: float, tol: float, n: int) -> int:
    """Iterations for a C-contraction to shrink an initial gap of n down to tol, plus slack."""
    if contraction >= 1.0:
        return FALLBACK_MAX_ITER
    if contraction <= 0.0:
        return 51
    return int(math.ceil(math.log(tol / max(n, 1)) / math.log(contraction))) + 50


def contraction_check(g: InterferenceGraph, m: ActivationModel, on_violation: str = "raise",
                      report: Optional[AssumptionReport] = None) -> AssumptionReport:
    """Constants of (m, g), raising or warning when C >= 1."""
    if on_violation not in ("raise", "warn"):
        raise ValidationError(f"on_violation must be 'raise' or 'warn', got '{on_violation}'")
    report = report or assumption_constants(m, g)
    if not report.contraction_ok:
        if on_violation == "raise":
            raise ContractionViolation(report.C)
        logger.warning("contraction constant C=%.4g >= 1; iterating anyway", report.C)
    return report


def mf_fixed_point(g: InterferenceGraph, m: ActivationModel, pi: PolicyLike,
                   tol: Optional[float] = None, max_iter: Optional[int] = None,
                   P0=None, on_violation: str = "raise",
                   report: Optional[AssumptionReport] = None) -> MeanFieldSolution:
    """Iterate mf_step from P0 (0.5 everywhere by default) until the max-norm change is <= tol.

    Args:
        g: Interference graph.
        m: Activation model.
        pi: Treatment probabilities.
        tol: Stopping tolerance, the configured mean-field tolerance by default.
        max_iter: Iteration budget, derived from the contraction constant by default.
        P0: Starting vector.
        on_violation: ``raise`` refuses a model with C >= 1, ``warn`` iterates anyway.
        report: Precomputed assumption constants.

    Returns:
        The converged solution.
    """
    policy = as_policy(pi, g.n)
    report = contraction_check(g, m, on_violation, report)
    tol = get_config().mf_tol if tol is None else float(tol)
    if max_iter is None:
        max_iter = default_max_iter(report.C, tol, g.n)

    P = np.full(g.n, 0.5) if P0 is None else np.array(P0, dtype=float)
    if P.shape != (g.n,):
        raise LengthMismatch("starting vector", int(P.size), g.n)

    change = math.inf
    iterations = 0
    while iterations < max_iter:
        nxt = _step(g, m, policy.values, P)
        change = float(np.abs(nxt - P).max())
        P = nxt
        iterations += 1
        if change <= tol:
            break
    else:
        logger.warning("mean-field iteration stopped at %d iterations, change %.3e", iterations, change)
        raise NoConvergence("mean-field fixed point", iterations, change)

    residual = float(np.abs(P - _step(g, m, policy.values, P)).max())
    return MeanFieldSolution(
        P_star=P,
        Q_star=g.neighbor_sums(P),
        iterations=iterations,
        residual=residual,
        policy=policy.values.copy(),
        graph_hash=g.fingerprint,
        model_hash=m.fingerprint,
    )
