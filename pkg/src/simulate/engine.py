"""The networked Bernoulli MDP: single steps, full runs and coupled pairs.

Treatments use W_it = 1{u <= pi_i} and outcomes Y_i,t+1 = 1{u <= f_i(Y_it, W_it, Z_it)},
with every u taken from the counter RNG at global time index burn_in + t.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Iterable, Optional, Union

import numpy as np

from ..activation import ActivationModel
from ..errors import LabError, LengthMismatch, ReplicationError, ValidationError
from ..graph import InterferenceGraph
from ..rng import CounterRng, Purpose
from .policy import PolicyLike, as_policy
from .trajectory import PRIMARY_LANES, InitSpec, Sharing, Trajectory

logger = logging.getLogger(__name__)

# uniforms generated per block: rows x n stays near this many doubles
_BLOCK_CELLS = 1 << 20


def _transition(g: InterferenceGraph, m: ActivationModel, table: Optional[np.ndarray],
                y: np.ndarray, w: np.ndarray, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Next state and the neighbour sums it was drawn from."""
    z = g.neighbor_sums(y)
    if table is not None:
        f = table[np.arange(g.n), y, w, z]
    else:
        f = m.curves(y, w, z)
    return (u <= f).astype(np.uint8), z


def mdp_step(g: InterferenceGraph, m: ActivationModel, y, w, draws) -> np.ndarray:
    """One transition: out[i] = 1 iff draws[i] <= f_i(y_i, w_i, Z_i)."""
    y = np.asarray(y).astype(np.uint8)
    w = np.asarray(w).astype(np.uint8)
    draws = np.asarray(draws, dtype=float)
    for name, arr in (("state", y), ("treatments", w), ("draws", draws)):
        if arr.shape != (g.n,):
            raise LengthMismatch(name, int(arr.size), g.n)
    out, _ = _transition(g, m, None, y, w, draws)
    return out


def _run_chain(g: InterferenceGraph, m: ActivationModel, pi: np.ndarray, horizon: int, seed: int,
               init: InitSpec, replication: int, burn_in: int, lanes: dict) -> Trajectory:
    n = g.n
    rng = CounterRng(seed)
    total = burn_in + horizon
    table = m.integer_table(g.max_degree)

    Y = np.empty((horizon + 1, n), dtype=np.uint8)
    W = np.empty((horizon, n), dtype=np.uint8)
    Z = np.empty((horizon, n), dtype=np.int64)

    y = init.draw(n, rng, replication, lanes[Purpose.INIT])
    if burn_in == 0:
        Y[0] = y

    rows = max(1, _BLOCK_CELLS // n)
    for start in range(0, total, rows):
        stop = min(total, start + rows)
        u_w = rng.block(Purpose.TREATMENT, start, stop, n, replication, lanes[Purpose.TREATMENT])
        u_y = rng.block(Purpose.OUTCOME, start, stop, n, replication, lanes[Purpose.OUTCOME])
        for r in range(stop - start):
            s = start + r
            w = (u_w[r] <= pi).astype(np.uint8)
            y_next, z = _transition(g, m, table, y, w, u_y[r])
            t = s - burn_in
            if t >= 0:
                W[t] = w
                Z[t] = z
                Y[t + 1] = y_next
            elif t == -1:
                Y[0] = y_next
            y = y_next

    return Trajectory(
        Y=Y, W=W, Z=Z,
        policy=np.array(pi, dtype=float),
        seed=int(seed),
        replication=int(replication),
        burn_in=int(burn_in),
        graph_hash=g.fingerprint,
        model_hash=m.fingerprint,
    )


def _check_run(g: InterferenceGraph, m: ActivationModel, horizon: int, burn_in: int) -> None:
    if m.n != g.n:
        raise LengthMismatch("activation model units", m.n, g.n)
    if horizon < 0 or burn_in < 0:
        raise ValidationError(f"Horizon and burn-in must be non-negative, got T={horizon}, burn_in={burn_in}")


def simulate(g: InterferenceGraph, m: ActivationModel, pi: PolicyLike, T: int, seed: int,
             init: Union[InitSpec, dict, None] = None, replication: int = 0,
             burn_in: int = 0) -> Trajectory:
    """Simulate T decision points after ``burn_in`` discarded steps.

    Args:
        g: Interference graph.
        m: Activation model for the units of ``g``.
        pi: Treatment probabilities (scalar or per unit).
        T: Number of recorded decision points.
        seed: Master seed of the counter RNG.
        init: Initial-state law, i.i.d. Bernoulli(0.5) by default.
        replication: Replication key of every stream.
        burn_in: Steps simulated before time 0 and not recorded.

    Returns:
        A deterministic function of (seed, replication, config).
    """
    _check_run(g, m, int(T), int(burn_in))
    policy = as_policy(pi, g.n)
    return _run_chain(g, m, policy.values, int(T), seed, InitSpec.from_spec(init),
                      int(replication), int(burn_in), PRIMARY_LANES)


def coupled_simulate(g: InterferenceGraph, m: ActivationModel, pi_a: PolicyLike, pi_b: PolicyLike,
                     T: int, seed: int, init_a=None, init_b=None,
                     share: Union[Sharing, dict, None] = None, replication: int = 0,
                     burn_in: int = 0) -> tuple[Trajectory, Trajectory]:
    """Two chains whose shared streams use identical uniforms per (t, i)."""
    _check_run(g, m, int(T), int(burn_in))
    share = Sharing.from_spec(share)
    a = _run_chain(g, m, as_policy(pi_a, g.n).values, int(T), seed, InitSpec.from_spec(init_a),
                   int(replication), int(burn_in), PRIMARY_LANES)
    b = _run_chain(g, m, as_policy(pi_b, g.n).values, int(T), seed, InitSpec.from_spec(init_b),
                   int(replication), int(burn_in), share.lanes())
    return a, b


def coupled_ensemble(g: InterferenceGraph, m: ActivationModel, pi_a: PolicyLike, pi_b: PolicyLike,
                     T: int, seed: int, replications: Union[int, Iterable[int]],
                     init_a=None, init_b=None, share=None, burn_in: int = 0,
                     workers: int = 1) -> list[tuple[Trajectory, Trajectory]]:
    """Coupled pairs for many replication keys, returned in replication order."""
    keys = list(range(replications)) if isinstance(replications, int) else [int(r) for r in replications]
    results: dict[int, tuple[Trajectory, Trajectory]] = {}

    def one(r: int):
        return coupled_simulate(g, m, pi_a, pi_b, T, seed, init_a, init_b, share,
                                replication=r, burn_in=burn_in)

    with ThreadPoolExecutor(max_workers=max(1, int(workers))) as executor:
        futures = {executor.submit(one, r): r for r in keys}
        for future in as_completed(futures):
            r = futures[future]
            try:
                results[r] = future.result()
            except LabError as e:
                raise ReplicationError(r, e) from e

    logger.debug("coupled ensemble: %d pairs, T=%d", len(keys), T)
    return [results[r] for r in keys]
