"""Config-driven experiments comparing estimators with exact or mean-field truth."""

from .config import ESTIMAND_KINDS, TRUTH_MODES, EstimandRequest, ExperimentConfig
from .scenarios import BUILTIN_SCENARIOS, load_scenario, scenario_names
from .runner import (
    COLUMNS,
    SUMMARY_COLUMNS,
    ExperimentResult,
    prepare,
    resolve_truth_mode,
    run_experiment,
    stationary_truths,
    summarize,
)

__all__ = [
    'ESTIMAND_KINDS',
    'TRUTH_MODES',
    'EstimandRequest',
    'ExperimentConfig',
    'BUILTIN_SCENARIOS',
    'load_scenario',
    'scenario_names',
    'COLUMNS',
    'SUMMARY_COLUMNS',
    'ExperimentResult',
    'prepare',
    'resolve_truth_mode',
    'run_experiment',
    'stationary_truths',
    'summarize',
    'run_scenario',
]


def run_scenario(name: str, **kwargs) -> ExperimentResult:
    """Load a named scenario and run it."""
    return run_experiment(load_scenario(name), **kwargs)
