"""EstimateReport records: value, tuning and diagnostics of one estimator call."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from ..graph import InterferenceGraph
from ..meanfield import resolve_direction
from ..simulate import Trajectory, as_policy
from ..utils import digest
from .cells import cell_table
from .direct import DENOMINATOR_THRESHOLD, lde_hat, sde_ipw, sde_ipw_avg
from .total import DEFAULT_ETA, DEFAULT_KAPPA, default_delta_T, lte_system_from_trajectory

logger = logging.getLogger(__name__)


def trajectory_key(traj: Trajectory) -> str:
    """Hash of everything needed to regenerate the trajectory."""
    return digest("trajectory", traj.seed, traj.replication, traj.burn_in, traj.T,
                  traj.graph_hash, traj.model_hash, np.asarray(traj.policy))


@dataclass
class EstimateReport:
    """One estimate with the inputs that reproduce it."""

    estimand: str
    value: float
    tuning: dict[str, Any] = field(default_factory=dict)
    flags: dict[str, int] = field(default_factory=dict)
    min_cell_visits: Optional[int] = None
    cell_counts: Optional[np.ndarray] = field(default=None, repr=False)
    trajectory: str = ""
    seed: int = 0
    replication: int = 0

    def to_dict(self) -> dict:
        out = {
            "estimand": self.estimand,
            "value": self.value,
            "tuning": self.tuning,
            "flags": self.flags,
            "min_cell_visits": self.min_cell_visits,
            "trajectory": self.trajectory,
            "seed": self.seed,
            "replication": self.replication,
        }
        if self.cell_counts is not None:
            out["cell_counts"] = self.cell_counts.tolist()
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _base(traj: Trajectory, estimand: str, value: float, **tuning) -> EstimateReport:
    return EstimateReport(estimand=estimand, value=float(value), tuning=tuning,
                          trajectory=trajectory_key(traj), seed=traj.seed, replication=traj.replication)


def report_sde(traj: Trajectory, t: Optional[int] = None, pi=None) -> EstimateReport:
    """IPW SDE at decision point t, or averaged over the whole run when t is None."""
    if t is None:
        report = _base(traj, "sde_avg", sde_ipw_avg(traj, pi), window=[0, traj.T])
    else:
        report = _base(traj, "sde", sde_ipw(traj, t, pi), t=int(t))
    return report


def report_lde(traj: Trajectory, gamma1: float, gamma2: float,
               threshold: float = DENOMINATOR_THRESHOLD) -> EstimateReport:
    counts = cell_table(traj).counts
    report = _base(traj, "lde", lde_hat(traj, gamma1, gamma2, threshold),
                   gamma1=float(gamma1), gamma2=float(gamma2), threshold=threshold)
    report.cell_counts = counts
    report.min_cell_visits = int(counts.min())
    return report


def report_lte(traj: Trajectory, g: InterferenceGraph, pi=None, delta: float = 0.1, v="ones",
               delta_T: Optional[float] = None, eta: float = DEFAULT_ETA, kappa: float = DEFAULT_KAPPA,
               m_guard: str = "abs") -> EstimateReport:
    delta_T = default_delta_T(traj.T) if delta_T is None else float(delta_T)
    policy = as_policy(traj.policy if pi is None else pi, g.n)
    vec = resolve_direction(v, policy)
    system, slopes = lte_system_from_trajectory(traj, g, policy, vec, delta_T, eta, kappa, m_guard)
    report = _base(traj, "lte", system.effect(delta), delta=float(delta),
                   v=v if isinstance(v, str) else [float(x) for x in vec], v_norm=float(np.linalg.norm(vec)),
                   delta_T=delta_T, eta=eta, kappa=kappa, m_guard=m_guard)
    report.flags = {
        "floored_cells": int(slopes.floored.sum()),
        "clipped_omega": system.clipped,
        "guarded_rows": system.guarded,
        "direct_solve": int(system.method == "direct"),
    }
    report.cell_counts = slopes.counts
    report.min_cell_visits = int(slopes.counts.min())
    if report.flags["floored_cells"]:
        logger.info("derivative floor set the denominator in %d of %d cells",
                    report.flags["floored_cells"], slopes.floored.size)
    if system.clipped:
        logger.info("omega clipped at 1 - kappa for %d of %d units", system.clipped, traj.n)
    return report
