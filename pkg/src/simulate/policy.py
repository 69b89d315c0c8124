"""Bernoulli treatment policies."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Union

import numpy as np

from ..errors import ConfigInvalid, LengthMismatch, PolicyOutOfRange, validate_unit_vector
from ..utils import digest


@dataclass(frozen=True, eq=False)
class PolicyVector:
    """Per-unit treatment probabilities, each strictly inside (0, 1)."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64).reshape(-1)
        bad = np.flatnonzero(~((arr > 0.0) & (arr < 1.0)))
        if bad.size:
            shown = ", ".join(f"pi[{i}]={arr[i]:g}" for i in bad[:5])
            raise PolicyOutOfRange(details=shown)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    @cached_property
    def fingerprint(self) -> str:
        return digest("policy", self.values)

    def equals(self, other: "PolicyVector") -> bool:
        return self.n == other.n and bool(np.array_equal(self.values, other.values))

    @classmethod
    def uniform(cls, n: int, p: float) -> "PolicyVector":
        return cls(np.full(int(n), float(p)))

    def shifted(self, delta: float, v) -> "PolicyVector":
        """pi + delta * v, which must stay inside (0, 1)."""
        return PolicyVector(self.values + float(delta) * validate_unit_vector(v, self.n, "direction"))

    def with_unit(self, i: int, value: float) -> "PolicyVector":
        """Copy with unit i's probability replaced."""
        arr = self.values.copy()
        arr[int(i)] = float(value)
        return PolicyVector(arr)


PolicyLike = Union[PolicyVector, float, np.ndarray, list, tuple]


def as_policy(pi: PolicyLike, n: int) -> PolicyVector:
    """Coerce a scalar or vector to a validated PolicyVector of length n."""
    if isinstance(pi, PolicyVector):
        if pi.n != n:
            raise LengthMismatch("policy", pi.n, n)
        return pi
    return PolicyVector(validate_unit_vector(pi, n, "policy"))


def policy_from_spec(spec: Union[Mapping, float, list], n: int) -> PolicyVector:
    """``{"kind": "uniform", "p": ..}`` or ``{"kind": "vector", "values": [..]}``."""
    if not isinstance(spec, Mapping):
        return as_policy(spec, n)
    kind = spec.get("kind", "uniform")
    if kind == "uniform":
        return PolicyVector.uniform(n, float(spec.get("p", 0.5)))
    if kind == "vector":
        return as_policy(spec.get("values", []), n)
    raise ConfigInvalid(f"Unknown policy kind '{kind}'", "choose uniform or vector")
