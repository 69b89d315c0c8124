"""MDP simulation under Bernoulli policies, coupled runs and trajectory files."""

from ..rng import CounterRng, Purpose
from .policy import PolicyLike, PolicyVector, as_policy, policy_from_spec
from .trajectory import InitSpec, Sharing, Trajectory
from .engine import mdp_step, simulate, coupled_simulate, coupled_ensemble
from .distance import empirical_distance, l1_samples
from .dumps import (
    read_trajectory_binary,
    read_trajectory_csv,
    write_trajectory_binary,
    write_trajectory_csv,
)

__all__ = [
    'CounterRng',
    'Purpose',
    'PolicyLike',
    'PolicyVector',
    'as_policy',
    'policy_from_spec',
    'InitSpec',
    'Sharing',
    'Trajectory',
    'mdp_step',
    'simulate',
    'coupled_simulate',
    'coupled_ensemble',
    'empirical_distance',
    'l1_samples',
    'read_trajectory_binary',
    'read_trajectory_csv',
    'write_trajectory_binary',
    'write_trajectory_csv',
]
