"""Distance bounds between the stationary law and the independent Bernoulli(P*) law."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

from ..activation import AssumptionReport


@dataclass(frozen=True)
class MeanFieldBounds:
    """Upper bounds on W_L1, W_dE(1) and W_dE(3); only defined when C < 1."""

    w_l1: float
    w_de1: float
    w_de3: float

    def to_dict(self) -> dict:
        return asdict(self)


def mean_field_bounds(report: AssumptionReport, n: int) -> Optional[MeanFieldBounds]:
    """Bounds implied by the contraction constant, or None when C >= 1."""
    c = report.C
    if c >= 1.0:
        return None
    gap = 1.0 - c
    root_d = math.sqrt(report.D_n)
    return MeanFieldBounds(
        w_l1=n * math.sqrt(report.L_n) * math.sqrt(c) / (2.0 * gap),
        w_de1=root_d * c / (2.0 * gap),
        w_de3=(2.0 * c * root_d + 1.0) / gap,
    )
