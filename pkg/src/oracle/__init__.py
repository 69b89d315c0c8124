"""Exact ground truth on small instances by enumeration of all 2^n states."""

from .chain import (
    ExactDistribution,
    check_oracle_size,
    exact_mean,
    exact_stationary,
    marginal_transition_prob,
    read_distribution_csv,
    state_bits,
    write_distribution_csv,
)
from .estimands import (
    exact_abcd_means,
    exact_cell_means,
    exact_expected_sde,
    exact_lde,
    exact_lde_characterization,
    exact_lte,
    exact_sde,
    exact_sde_states,
)

__all__ = [
    'ExactDistribution',
    'check_oracle_size',
    'exact_mean',
    'exact_stationary',
    'marginal_transition_prob',
    'read_distribution_csv',
    'state_bits',
    'write_distribution_csv',
    'exact_abcd_means',
    'exact_cell_means',
    'exact_expected_sde',
    'exact_lde',
    'exact_lde_characterization',
    'exact_lte',
    'exact_sde',
    'exact_sde_states',
]
