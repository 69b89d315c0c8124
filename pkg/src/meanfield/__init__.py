"""Mean-field fixed point, its policy derivative and mean-field ground truths."""

from .solver import (
    MeanFieldSolution,
    contraction_check,
    default_max_iter,
    mf_fixed_point,
    mf_step,
)
from .derivative import (
    direction,
    mf_derivative,
    mf_jacobian_parts,
    mf_lde,
    mf_lte,
    mf_lte_linear,
    resolve_direction,
    solve_neumann,
)
from .bounds import MeanFieldBounds, mean_field_bounds

__all__ = [
    'MeanFieldSolution',
    'contraction_check',
    'default_max_iter',
    'mf_fixed_point',
    'mf_step',
    'direction',
    'mf_derivative',
    'mf_jacobian_parts',
    'mf_lde',
    'mf_lte',
    'mf_lte_linear',
    'resolve_direction',
    'solve_neumann',
    'MeanFieldBounds',
    'mean_field_bounds',
]
