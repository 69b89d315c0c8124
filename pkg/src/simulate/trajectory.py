"""Trajectory records and the small specs that configure a simulation run."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Union

import numpy as np

from ..errors import ConfigInvalid, LengthMismatch, TimeOutOfRange
from ..rng import CounterRng, Purpose


@dataclass(frozen=True, eq=False)
class Trajectory:
    """One recorded run: Y is (T+1) x n, W and Z are T x n.

    Time 0 is the first recorded decision point; burn-in steps before it are
    simulated but not stored.
    """

    Y: np.ndarray
    W: np.ndarray
    Z: np.ndarray
    policy: np.ndarray
    seed: int
    replication: int = 0
    burn_in: int = 0
    graph_hash: str = ""
    model_hash: str = ""

    def __post_init__(self):
        if self.Y.ndim != 2 or self.W.shape != (self.Y.shape[0] - 1, self.Y.shape[1]):
            raise LengthMismatch("treatment rows", int(self.W.shape[0]), int(self.Y.shape[0]) - 1)
        if self.Z.shape != self.W.shape:
            raise LengthMismatch("neighbour-sum rows", int(self.Z.shape[0]), int(self.W.shape[0]))
        for arr in (self.Y, self.W, self.Z, self.policy):
            arr.setflags(write=False)

    @property
    def T(self) -> int:
        return int(self.W.shape[0])

    @property
    def n(self) -> int:
        return int(self.Y.shape[1])

    def state(self, t: int) -> np.ndarray:
        if not 0 <= t <= self.T:
            raise TimeOutOfRange(t, self.T + 1)
        return self.Y[t]

    def prefix(self, T: int) -> "Trajectory":
        """The first T decision points; equal to a fresh run of horizon T with the same keys."""
        if not 0 <= T <= self.T:
            raise TimeOutOfRange(T, self.T + 1)
        return Trajectory(
            Y=self.Y[:T + 1].copy(), W=self.W[:T].copy(), Z=self.Z[:T].copy(),
            policy=self.policy.copy(), seed=self.seed, replication=self.replication,
            burn_in=self.burn_in, graph_hash=self.graph_hash, model_hash=self.model_hash,
        )

    def same_draws_as(self, other: "Trajectory") -> bool:
        return (np.array_equal(self.Y, other.Y) and np.array_equal(self.W, other.W)
                and np.array_equal(self.Z, other.Z))


@dataclass(frozen=True)
class InitSpec:
    """Initial-state law: ``bernoulli`` (i.i.d. p), ``fixed`` (state) or ``product`` (per-unit probs)."""

    kind: str = "bernoulli"
    p: float = 0.5
    state: tuple[int, ...] = ()
    probs: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in ("bernoulli", "fixed", "product"):
            raise ConfigInvalid(f"Unknown init kind '{self.kind}'", "choose bernoulli, fixed or product")
        if self.kind == "bernoulli" and not 0.0 <= self.p <= 1.0:
            raise ConfigInvalid(f"Init probability {self.p} outside [0, 1]")
        if self.kind == "fixed" and any(x not in (0, 1) for x in self.state):
            raise ConfigInvalid("Fixed initial state must be binary")
        if self.kind == "product" and any(not 0.0 <= p <= 1.0 for p in self.probs):
            raise ConfigInvalid("Product init probabilities must lie in [0, 1]")

    @classmethod
    def from_spec(cls, spec: Union["InitSpec", Mapping, None]) -> "InitSpec":
        if spec is None:
            return cls()
        if isinstance(spec, InitSpec):
            return spec
        kind = spec.get("kind", "bernoulli")
        if kind == "fixed":
            return cls(kind="fixed", state=tuple(int(x) for x in spec["state"]))
        if kind == "product":
            return cls(kind="product", probs=tuple(float(x) for x in spec["probs"]))
        return cls(kind=kind, p=float(spec.get("p", 0.5)))

    @classmethod
    def fixed(cls, state) -> "InitSpec":
        return cls(kind="fixed", state=tuple(int(x) for x in np.asarray(state).reshape(-1)))

    @classmethod
    def product(cls, probs) -> "InitSpec":
        return cls(kind="product", probs=tuple(float(x) for x in np.asarray(probs).reshape(-1)))

    def draw(self, n: int, rng: CounterRng, replication: int = 0, lane: int = 0) -> np.ndarray:
        if self.kind == "fixed":
            if len(self.state) != n:
                raise LengthMismatch("initial state", len(self.state), n)
            return np.array(self.state, dtype=np.uint8)
        if self.kind == "product":
            if len(self.probs) != n:
                raise LengthMismatch("initial probabilities", len(self.probs), n)
            probs = np.array(self.probs)
        else:
            probs = np.full(n, self.p)
        u = rng.uniforms(Purpose.INIT, 0, np.arange(n), replication=replication, lane=lane)
        return (u < probs).astype(np.uint8)


@dataclass(frozen=True)
class Sharing:
    """Which random streams the second chain of a coupled pair shares with the first."""

    treatments: bool = True
    outcomes: bool = True
    init: bool = True

    @classmethod
    def none(cls) -> "Sharing":
        return cls(False, False, False)

    @classmethod
    def from_spec(cls, spec: Optional[Mapping]) -> "Sharing":
        if spec is None:
            return cls()
        if isinstance(spec, Sharing):
            return spec
        return cls(bool(spec.get("treatments", True)), bool(spec.get("outcomes", True)),
                   bool(spec.get("init", True)))

    def lanes(self) -> dict[Purpose, int]:
        """Stream lanes of the second chain; unshared streams move to lane 1."""
        return {
            Purpose.TREATMENT: 0 if self.treatments else 1,
            Purpose.OUTCOME: 0 if self.outcomes else 1,
            Purpose.INIT: 0 if self.init else 1,
        }


PRIMARY_LANES = {Purpose.TREATMENT: 0, Purpose.OUTCOME: 0, Purpose.INIT: 0}
