"""Lipschitz, self-feedback and contraction constants of an activation model."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import LengthMismatch
from ..graph import InterferenceGraph
from .model import ActivationModel

logger = logging.getLogger(__name__)

# C_L2 at or below this counts as "smooth" in reports
SMOOTHNESS_LIMIT = 1.0


@dataclass(frozen=True)
class AssumptionReport:
    """Constants of a (model, graph) pair and the flags derived from them."""

    L_n: float
    B: float
    L2_n: float
    D_n: int
    C: float
    C_L2: float
    contraction_ok: bool
    smoothness_ok: bool
    L_per_unit: tuple[float, ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["L_per_unit"] = list(self.L_per_unit)
        return out


def self_feedback_bound(m: ActivationModel, degrees: np.ndarray) -> float:
    """B = max over units, w and feasible z of |c(z) + d(z) w| = |f(1,w,z) - f(0,w,z)|.

    Families evaluated on a grid finer than the integers add their grid slack,
    so the result is an upper bound on the supremum rather than a sample of it.
    """
    values = m.corner_values(degrees)  # (n, y, w, G)
    gaps = np.abs(values[:, 1, :, :] - values[:, 0, :, :]).max(axis=(1, 2))
    return float((gaps + m.grid_slack(degrees)).max()) if m.n else 0.0


def assumption_constants(m: ActivationModel, g: InterferenceGraph,
                         smoothness_limit: float = SMOOTHNESS_LIMIT) -> AssumptionReport:
    """Compute L_n, B, L2_n, D_n and C = B + L_n D_n for a model on a graph."""
    if m.n != g.n:
        raise LengthMismatch("activation model units", m.n, g.n)

    degrees = g.degrees
    d_n = g.max_degree
    per_unit = m.lipschitz(degrees)
    l_n = float(per_unit.max()) if per_unit.size else 0.0
    l2_n = float(m.curvature(degrees).max()) if m.n else 0.0
    b = self_feedback_bound(m, degrees)
    c = b + l_n * d_n
    c_l2 = l2_n * d_n * d_n

    report = AssumptionReport(
        L_n=l_n,
        B=b,
        L2_n=l2_n,
        D_n=d_n,
        C=c,
        C_L2=c_l2,
        contraction_ok=bool(c < 1.0),
        smoothness_ok=bool(c_l2 <= smoothness_limit),
        L_per_unit=tuple(float(x) for x in per_unit),
    )
    logger.debug("constants: L_n=%.4g B=%.4g D_n=%d C=%.4g C_L2=%.4g", l_n, b, d_n, c, c_l2)
    return report
