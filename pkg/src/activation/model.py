"""Activation models f_i(y, w, z) and their (a, b, c, d) decomposition.

Parameters are stored per unit and per (y, w) corner in arrays of shape
(n, 2, 2), indexed ``[unit, y, w]``. All evaluation methods broadcast over
``units``, ``y``, ``w`` and ``z`` so a whole population is evaluated at once.
"""

from __future__ import annotations

import abc
from functools import cached_property

import numpy as np
from scipy.special import expit

from ..utils import digest

# strict-interior margin for 0 < f < 1
MARGIN = 1e-9

CORNERS = ((0, 0), (0, 1), (1, 0), (1, 1))

# integer lookup tables above this many entries are not built
_TABLE_LIMIT = 1 << 24


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=np.float64)
    out.setflags(write=False)
    return out


class ActivationModel(abc.ABC):
    """Per-unit outcome-probability curves for binary y, w and real z >= 0."""

    family: str = ""

    def __init__(self, n: int):
        self.n = int(n)

    # -- family-specific pieces ---------------------------------------------

    @abc.abstractmethod
    def prob(self, units, y, w, z) -> np.ndarray:
        """f_i(y, w, z) broadcast over the arguments."""

    @abc.abstractmethod
    def deriv(self, units, y, w, z) -> np.ndarray:
        """Derivative of f_i(y, w, .) with respect to z."""

    @abc.abstractmethod
    def lipschitz(self, degrees: np.ndarray) -> np.ndarray:
        """Per-unit sup of |df/dz| over corners and z in [0, degree(i)]."""

    @abc.abstractmethod
    def curvature(self, degrees: np.ndarray) -> np.ndarray:
        """Per-unit sup of |d2f/dz2| over corners and z in [0, degree(i)]."""

    @abc.abstractmethod
    def parameters(self) -> dict[str, np.ndarray]:
        """Named parameter arrays (used for hashing and reports)."""

    # grid points per unit neighbour count used by range and B checks
    grid_resolution: int = 1

    # -- shared behaviour ---------------------------------------------------

    @cached_property
    def fingerprint(self) -> str:
        params = self.parameters()
        return digest("model", self.family, self.n, *[(k, params[k]) for k in sorted(params)])

    @property
    def units(self) -> np.ndarray:
        return np.arange(self.n)

    def curves(self, y, w, z) -> np.ndarray:
        """f_i(y_i, w_i, z_i) for every unit i."""
        return self.prob(self.units, np.asarray(y, dtype=np.int64), np.asarray(w, dtype=np.int64), z)

    def abcd(self, units, z) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        f00 = self.prob(units, 0, 0, z)
        f01 = self.prob(units, 0, 1, z)
        f10 = self.prob(units, 1, 0, z)
        f11 = self.prob(units, 1, 1, z)
        return f00, f01 - f00, f10 - f00, f11 - f01 - f10 + f00

    def abcd_deriv(self, units, z) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        g00 = self.deriv(units, 0, 0, z)
        g01 = self.deriv(units, 0, 1, z)
        g10 = self.deriv(units, 1, 0, z)
        g11 = self.deriv(units, 1, 1, z)
        return g00, g01 - g00, g10 - g00, g11 - g01 - g10 + g00

    def bilinear(self, y, w, z) -> np.ndarray:
        """a + b w + c y + d w y for real y, w in [0, 1] (all units)."""
        a, b, c, d = self.abcd(self.units, z)
        return a + b * w + c * y + d * w * y

    def bilinear_deriv(self, y, w, z) -> np.ndarray:
        """z-derivative of the bilinear extension, a' + b' w + c' y + d' w y."""
        a, b, c, d = self.abcd_deriv(self.units, z)
        return a + b * w + c * y + d * w * y

    def feasible_grid(self, degrees: np.ndarray) -> np.ndarray:
        """(n, G) grid of z values covering [0, degree(i)] for every unit."""
        degrees = np.asarray(degrees)
        top = int(degrees.max()) if degrees.size else 0
        base = np.linspace(0.0, float(top), self.grid_resolution * top + 1)
        return np.minimum(base[None, :], degrees[:, None].astype(float))

    def grid_slack(self, degrees: np.ndarray) -> np.ndarray:
        """Per-unit amount a max of |f(1,w,.) - f(0,w,.)| over feasible_grid may fall short of the sup."""
        return np.zeros(self.n)

    def integer_table(self, max_degree: int) -> np.ndarray | None:
        """f[i, y, w, z] on z = 0..max_degree, or None when too large to cache."""
        size = self.n * 4 * (int(max_degree) + 1)
        if size > _TABLE_LIMIT:
            return None
        cache = self.__dict__.setdefault("_tables", {})
        if max_degree not in cache:
            u = self.units[:, None, None, None]
            y = np.arange(2)[None, :, None, None]
            w = np.arange(2)[None, None, :, None]
            z = np.arange(int(max_degree) + 1, dtype=float)[None, None, None, :]
            table = np.ascontiguousarray(self.prob(u, y, w, z))
            table.setflags(write=False)
            cache[max_degree] = table
        return cache[max_degree]

    def corner_values(self, degrees: np.ndarray) -> np.ndarray:
        """(n, 2, 2, G) values of every curve on the feasible grid."""
        z = self.feasible_grid(degrees)
        u = self.units[:, None, None, None]
        y = np.arange(2)[None, :, None, None]
        w = np.arange(2)[None, None, :, None]
        return self.prob(u, y, w, z[:, None, None, :])

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n}, fingerprint={self.fingerprint[:12]})"


class AffineActivation(ActivationModel):
    """f^{(y,w)}(z) = base_{yw} + slope_{yw} z."""

    family = "affine"

    def __init__(self, base, slope):
        base = _frozen(base)
        super().__init__(base.shape[0])
        self.base = base
        self.slope = _frozen(slope)

    def prob(self, units, y, w, z):
        return self.base[units, y, w] + self.slope[units, y, w] * z

    def deriv(self, units, y, w, z):
        return np.broadcast_to(self.slope[units, y, w], np.broadcast_shapes(
            np.shape(self.slope[units, y, w]), np.shape(z))).astype(float)

    def lipschitz(self, degrees):
        return np.abs(self.slope).reshape(self.n, 4).max(axis=1)

    def curvature(self, degrees):
        return np.zeros(self.n)

    def parameters(self):
        return {"base": self.base, "slope": self.slope}


class LogisticActivation(ActivationModel):
    """f^{(y,w)}(z) = sigmoid(theta0_{yw} + thetaz_{yw} z / s_i)."""

    family = "logistic"
    grid_resolution = 8

    # |s(1-s)(1-2s)| peaks at x = +-ln(2 + sqrt(3))
    _CURVATURE_PEAK = float(np.log(2.0 + np.sqrt(3.0)))

    def __init__(self, theta0, thetaz, scale):
        theta0 = _frozen(theta0)
        super().__init__(theta0.shape[0])
        self.theta0 = theta0
        self.thetaz = _frozen(thetaz)
        self.scale = _frozen(np.broadcast_to(np.asarray(scale, dtype=float), (self.n,)))

    def _logit(self, units, y, w, z):
        return self.theta0[units, y, w] + self.thetaz[units, y, w] * z / self.scale[units]

    def prob(self, units, y, w, z):
        return expit(self._logit(units, y, w, z))

    def deriv(self, units, y, w, z):
        s = expit(self._logit(units, y, w, z))
        return s * (1.0 - s) * self.thetaz[units, y, w] / self.scale[units]

    def second_deriv(self, units, y, w, z):
        s = expit(self._logit(units, y, w, z))
        k = self.thetaz[units, y, w] / self.scale[units]
        return s * (1.0 - s) * (1.0 - 2.0 * s) * k * k

    def _logit_range(self, degrees):
        k = self.thetaz / self.scale[:, None, None]
        lo = self.theta0
        hi = self.theta0 + k * np.asarray(degrees, dtype=float)[:, None, None]
        return k, np.minimum(lo, hi), np.maximum(lo, hi)

    def lipschitz(self, degrees):
        k, lo, hi = self._logit_range(degrees)
        s = expit(np.clip(0.0, lo, hi))
        return (np.abs(k) * s * (1.0 - s)).reshape(self.n, 4).max(axis=1)

    def curvature(self, degrees):
        k, lo, hi = self._logit_range(degrees)

        def g(x):
            s = expit(x)
            return np.abs(s * (1.0 - s) * (1.0 - 2.0 * s))

        peak = np.maximum(g(np.clip(self._CURVATURE_PEAK, lo, hi)), g(np.clip(-self._CURVATURE_PEAK, lo, hi)))
        return (k * k * peak).reshape(self.n, 4).max(axis=1)

    def grid_slack(self, degrees):
        # |f(1,w,.) - f(0,w,.)| is 2L-Lipschitz and every feasible z lies within half a grid step of a point
        half_step = 0.5 / self.grid_resolution
        return np.where(np.asarray(degrees) > 0, 2.0 * self.lipschitz(degrees) * half_step, 0.0)

    def parameters(self):
        return {"theta0": self.theta0, "thetaz": self.thetaz, "scale": self.scale}


class TabulatedActivation(ActivationModel):
    """Values on the integer grid 0..len-1, linear between knots, constant beyond."""

    family = "tabulated"

    def __init__(self, table, lengths):
        table = _frozen(table)
        super().__init__(table.shape[0])
        self.table = table
        self.lengths = np.asarray(lengths, dtype=np.int64)
        self.lengths.setflags(write=False)

    def prob(self, units, y, w, z):
        top = self.lengths[units] - 1
        zc = np.clip(z, 0.0, top)
        k = np.clip(np.floor(zc).astype(np.int64), 0, np.maximum(top - 1, 0))
        frac = zc - k
        v0 = self.table[units, y, w, k]
        v1 = self.table[units, y, w, np.minimum(k + 1, top)]
        return v0 + frac * (v1 - v0)

    def deriv(self, units, y, w, z):
        """Difference quotient over [z - 1, z + 1] with both ends clamped to the grid [0, top]."""
        z = np.asarray(z, dtype=float)
        top = self.lengths[units] - 1
        lo = np.clip(z - 1.0, 0.0, top)
        hi = np.clip(z + 1.0, 0.0, top)
        span = hi - lo
        rise = self.prob(units, y, w, hi) - self.prob(units, y, w, lo)
        return np.where(span > 0, rise / np.where(span > 0, span, 1.0), 0.0)

    def lipschitz(self, degrees):
        steps = np.abs(np.diff(self.table, axis=-1))  # (n, 2, 2, K-1)
        if steps.shape[-1] == 0:
            return np.zeros(self.n)
        knot = np.arange(steps.shape[-1])[None, :]
        limit = np.minimum(np.asarray(degrees)[:, None], (self.lengths - 1)[:, None])
        valid = (knot + 1) <= limit  # (n, K-1)
        masked = np.where(valid[:, None, None, :], steps, 0.0)
        return masked.reshape(self.n, -1).max(axis=1)

    def curvature(self, degrees):
        return np.zeros(self.n)

    def parameters(self):
        return {"table": self.table, "lengths": self.lengths.astype(np.float64)}


# ---------------------------------------------------------------------------
# Module-level operations
# ---------------------------------------------------------------------------

def eval_f(m: ActivationModel, i: int, y: int, w: int, z: float) -> float:
    """f_i(y, w, z)."""
    return float(m.prob(int(i), int(y), int(w), float(z)))


def eval_abcd(m: ActivationModel, i: int, z: float) -> tuple[float, float, float, float]:
    """(a, b, c, d) at z for unit i."""
    a, b, c, d = m.abcd(int(i), float(z))
    return float(a), float(b), float(c), float(d)


def eval_f_deriv(m: ActivationModel, i: int, y: int, w: int, z: float) -> float:
    """df_i(y, w, z)/dz."""
    return float(m.deriv(int(i), int(y), int(w), float(z)))
