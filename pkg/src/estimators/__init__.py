"""Data-driven estimators of the short-term, long-term direct and long-term total effects."""

from .cells import CellTable, abcd_from_cells, abcd_hat, cell_table, fhat, phat, phat_all
from .direct import DENOMINATOR_THRESHOLD, lde_from_moments, lde_hat, sde_ipw, sde_ipw_avg
from .total import (
    DEFAULT_ETA,
    DEFAULT_KAPPA,
    LteSystem,
    SlopeTable,
    default_delta_T,
    fprime_hat,
    fprime_table,
    lte_from_moments,
    lte_hat,
    solve_lte_system,
)
from .report import EstimateReport, report_lde, report_lte, report_sde, trajectory_key

__all__ = [
    'CellTable',
    'abcd_from_cells',
    'abcd_hat',
    'cell_table',
    'fhat',
    'phat',
    'phat_all',
    'DENOMINATOR_THRESHOLD',
    'lde_from_moments',
    'lde_hat',
    'sde_ipw',
    'sde_ipw_avg',
    'DEFAULT_ETA',
    'DEFAULT_KAPPA',
    'LteSystem',
    'SlopeTable',
    'default_delta_T',
    'fprime_hat',
    'fprime_table',
    'lte_from_moments',
    'lte_hat',
    'solve_lte_system',
    'EstimateReport',
    'report_lde',
    'report_lte',
    'report_sde',
    'trajectory_key',
]
