"""Counter-based random numbers.

Every uniform is a pure function of ``(seed, purpose, replication, lane, t, i)``:
the indices are absorbed one after another into a 64-bit state with the
splitmix64 finaliser, and the top 53 bits of the result become a double in
[0, 1). There is no sequential hidden state, so any draw can be reproduced in
isolation, coupled chains can share exactly the draws they need, and
replications may run in any order on any number of threads.
"""

from __future__ import annotations

from enum import IntEnum

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV_2_53 = 1.0 / float(1 << 53)


class Purpose(IntEnum):
    """Stream tags; each purpose draws from its own family of counters."""

    TREATMENT = 1
    OUTCOME = 2
    INIT = 3
    LATENT_TYPE = 4
    EDGE = 5


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def _absorb(h: np.ndarray, x: np.ndarray) -> np.ndarray:
    return _mix64(h ^ _mix64(x + _GOLDEN))


def _as_u64(values) -> np.ndarray:
    arr = np.asarray(values)
    if arr.dtype != np.uint64:
        if np.any(arr < 0):
            raise ValueError("counter indices must be non-negative")
        arr = arr.astype(np.uint64)
    return arr


class CounterRng:
    """Keyed uniform generator implementing the reproducibility contract."""

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64

    def __repr__(self) -> str:
        return f"CounterRng(seed={self.seed})"

    def _stream_key(self, purpose: Purpose, replication: int, lane: int) -> np.ndarray:
        key = np.array([self.seed], dtype=np.uint64)
        for part in (int(purpose), int(replication), int(lane)):
            key = _absorb(key, np.array([part & _MASK64], dtype=np.uint64))
        return key

    def uniforms(self, purpose: Purpose, t, i, replication: int = 0, lane: int = 0) -> np.ndarray:
        """Uniforms on [0, 1) for the broadcast grid of (t, i) counters."""
        t_arr = _as_u64(t)
        i_arr = _as_u64(i)
        shape = np.broadcast_shapes(t_arr.shape, i_arr.shape)
        with np.errstate(over="ignore"):
            key = self._stream_key(purpose, replication, lane)
            h = _absorb(key.reshape((1,) * len(shape)) if shape else key, t_arr)
            h = _absorb(h, i_arr)
        out = (h >> _S11).astype(np.float64) * _INV_2_53
        return out.reshape(shape)

    def block(self, purpose: Purpose, t_start: int, t_stop: int, n: int,
              replication: int = 0, lane: int = 0) -> np.ndarray:
        """Matrix of uniforms with rows t_start..t_stop-1 and columns 0..n-1."""
        t = np.arange(t_start, t_stop, dtype=np.uint64)[:, None]
        i = np.arange(n, dtype=np.uint64)[None, :]
        return self.uniforms(purpose, t, i, replication=replication, lane=lane)
