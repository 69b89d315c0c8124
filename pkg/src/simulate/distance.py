"""Distances between coupled chains, estimated over an ensemble of pairs."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from ..errors import EmptyEnsemble, TimeOutOfRange, ValidationError
from ..graph import InterferenceGraph
from .trajectory import Trajectory

Pair = tuple[Trajectory, Trajectory]


def _states_at(pairs: Sequence[Pair], t: int) -> tuple[np.ndarray, np.ndarray]:
    if not pairs:
        raise EmptyEnsemble()
    horizon = pairs[0][0].T
    graph = pairs[0][0].graph_hash
    for a, b in pairs:
        if a.T != horizon or b.T != horizon or a.graph_hash != graph or b.graph_hash != graph:
            raise ValidationError("Ensemble pairs must share graph and horizon")
    if not 0 <= t <= horizon:
        raise TimeOutOfRange(t, horizon + 1)
    x = np.stack([a.Y[t] for a, _ in pairs]).astype(np.int64)
    y = np.stack([b.Y[t] for _, b in pairs]).astype(np.int64)
    return x, y


def l1_samples(pairs: Sequence[Pair], t: int) -> np.ndarray:
    """Per-pair ||X_t - Y_t||_1."""
    x, y = _states_at(pairs, t)
    return np.abs(x - y).sum(axis=1).astype(float)


def empirical_distance(pairs: Sequence[Pair], t: int, metric: str = "L1", k: int = 1,
                       g: Optional[InterferenceGraph] = None) -> float:
    """Ensemble estimate of the L1 or graph-dependent dE(k) distance at time t.

    ``L1`` is the mean of ||X_t - Y_t||_1. ``dE`` is the max over units of
    (mean over pairs of (sum over neighbours of |X_jt - Y_jt|)^k)^(1/k) and
    needs the graph. ``dE1`` and ``dE3`` are accepted as shorthands.
    """
    metric = metric.strip()
    if metric.lower().startswith("de") and len(metric) > 2:
        k = int(metric[2:].strip("()"))
        metric = "dE"

    if metric.upper() == "L1":
        return float(l1_samples(pairs, t).mean())

    if metric != "dE":
        raise ValidationError(f"Unknown distance metric '{metric}'", "choose L1 or dE")
    if k < 1:
        raise ValidationError(f"dE order must be a positive integer, got {k}")
    if g is None:
        raise ValidationError("The dE distance needs the interference graph")

    x, y = _states_at(pairs, t)
    if x.shape[1] != g.n or g.fingerprint != pairs[0][0].graph_hash:
        raise ValidationError("Graph does not match the ensemble trajectories")
    seen = g.neighbor_sums(np.abs(x - y)).astype(float)  # (R, n)
    moments = (seen ** k).mean(axis=0)
    return float(moments.max() ** (1.0 / k))
