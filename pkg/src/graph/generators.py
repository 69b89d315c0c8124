"""Random interference graphs: Erdos-Renyi and graphon (latent type) models.

Both generators draw one uniform per unordered pair (i, j), i < j, from the
EDGE stream of the counter RNG, keyed by (t=i, i=j). A pair is included when
its uniform falls below its inclusion probability, so the graphon with a
constant kernel equal to one reproduces the Erdos-Renyi graph bit for bit.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from ..errors import InvalidKernel, InvalidProbability
from ..rng import CounterRng, Purpose
from .network import InterferenceGraph, _from_pair_arrays

logger = logging.getLogger(__name__)

# rows of the upper triangle processed per block
_ROW_BLOCK = 256


@dataclass(frozen=True)
class Kernel:
    """A graphon kernel from the built-in menu.

    kind: ``constant`` (value), ``block`` (symmetric K x K matrix over K
    equal-width type intervals) or ``product`` (G(u, v) = g(u) g(v) with g
    piecewise constant: ``values[k]`` on the k-th interval cut by ``breaks``).
    """

    kind: str
    value: float = 1.0
    matrix: tuple[tuple[float, ...], ...] = ()
    breaks: tuple[float, ...] = ()
    values: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind == "constant":
            if not 0.0 <= self.value <= 1.0:
                raise InvalidKernel("Constant kernel outside [0, 1]", f"value={self.value}")
        elif self.kind == "block":
            m = np.asarray(self.matrix, dtype=float)
            if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
                raise InvalidKernel("Block kernel must be a non-empty square matrix", f"shape={m.shape}")
            if np.any(m < 0) or np.any(m > 1):
                raise InvalidKernel("Block kernel entries outside [0, 1]")
            if not np.allclose(m, m.T, rtol=0.0, atol=0.0):
                raise InvalidKernel("Block kernel matrix is not symmetric")
        elif self.kind == "product":
            vals = np.asarray(self.values, dtype=float)
            brk = np.asarray(self.breaks, dtype=float)
            if vals.size == 0 or brk.size != vals.size - 1:
                raise InvalidKernel("Product kernel needs len(breaks) == len(values) - 1",
                                    f"breaks={list(brk)}, values={list(vals)}")
            if np.any(vals < 0) or np.any(vals > 1):
                raise InvalidKernel("Product kernel values outside [0, 1]")
            if np.any(np.diff(brk) <= 0) or np.any(brk <= 0) or np.any(brk >= 1):
                raise InvalidKernel("Product kernel breaks must be increasing inside (0, 1)")
        else:
            raise InvalidKernel(f"Unknown kernel type '{self.kind}'",
                                "choose constant, block or product")

    @classmethod
    def from_spec(cls, spec: Union["Kernel", Mapping, float, None]) -> "Kernel":
        if spec is None:
            return cls(kind="constant", value=1.0)
        if isinstance(spec, Kernel):
            return spec
        if isinstance(spec, (int, float)):
            return cls(kind="constant", value=float(spec))
        kind = spec.get("type", spec.get("kind"))
        if kind == "constant":
            return cls(kind="constant", value=float(spec.get("value", 1.0)))
        if kind == "block":
            return cls(kind="block", matrix=tuple(tuple(float(x) for x in row) for row in spec["matrix"]))
        if kind == "product":
            return cls(kind="product", breaks=tuple(float(b) for b in spec.get("breaks", ())),
                       values=tuple(float(v) for v in spec["values"]))
        raise InvalidKernel(f"Unknown kernel type '{kind}'", "choose constant, block or product")

    def evaluate(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """G(u, v) for broadcastable arrays of latent types."""
        if self.kind == "constant":
            return np.full(np.broadcast_shapes(np.shape(u), np.shape(v)), self.value)
        if self.kind == "block":
            m = np.asarray(self.matrix, dtype=float)
            return m[self.block_of(u), self.block_of(v)]
        g = np.asarray(self.values, dtype=float)
        brk = np.asarray(self.breaks, dtype=float)
        return g[np.searchsorted(brk, u, side="right")] * g[np.searchsorted(brk, v, side="right")]

    def block_of(self, u: np.ndarray) -> np.ndarray:
        """Block index of each latent type (block kernels only)."""
        k = len(self.matrix)
        return np.minimum((np.asarray(u) * k).astype(np.int64), k - 1)


def _check_probability(rho: float) -> float:
    rho = float(rho)
    if not 0.0 <= rho <= 1.0 or np.isnan(rho):
        raise InvalidProbability(rho)
    return rho


def _sample_pairs(n: int, seed: int, edge_prob) -> InterferenceGraph:
    """Include (i, j), i < j, when its EDGE uniform is below edge_prob(rows, cols)."""
    rng = CounterRng(seed)
    kept_rows, kept_cols = [], []
    for start in range(0, n, _ROW_BLOCK):
        stop = min(n, start + _ROW_BLOCK)
        rows = np.arange(start, stop)[:, None]
        cols = np.arange(n)[None, :]
        upper = cols > rows
        u = rng.uniforms(Purpose.EDGE, rows, cols)
        keep = upper & (u < edge_prob(rows, cols))
        r, c = np.nonzero(keep)
        kept_rows.append(r + start)
        kept_cols.append(c)
    rows = np.concatenate(kept_rows) if kept_rows else np.empty(0, dtype=np.int64)
    cols = np.concatenate(kept_cols) if kept_cols else np.empty(0, dtype=np.int64)
    return _from_pair_arrays(n, rows, cols)


def gen_erdos_renyi(n: int, rho: float, seed: int) -> InterferenceGraph:
    """Each unordered pair is an edge independently with probability rho."""
    rho = _check_probability(rho)
    g = _sample_pairs(int(n), seed, lambda rows, cols: rho)
    logger.debug("erdos_renyi n=%d rho=%g seed=%d -> %d edges", n, rho, seed, g.edge_count)
    return g


def latent_types(n: int, seed: int) -> np.ndarray:
    """U_i ~ Uniform[0, 1) i.i.d. from the latent-type stream."""
    return CounterRng(seed).uniforms(Purpose.LATENT_TYPE, 0, np.arange(int(n)))


def gen_graphon(n: int, rho: float, kernel, seed: int) -> tuple[InterferenceGraph, np.ndarray]:
    """Pair (i, j) included with probability rho * G(U_i, U_j); returns (graph, U)."""
    rho = _check_probability(rho)
    kernel = Kernel.from_spec(kernel)
    u = latent_types(n, seed)

    def edge_prob(rows, cols):
        return rho * kernel.evaluate(u[rows], u[cols])

    g = _sample_pairs(int(n), seed, edge_prob)
    logger.debug("graphon n=%d rho=%g kernel=%s seed=%d -> %d edges", n, rho, kernel.kind, seed, g.edge_count)
    return g, u
