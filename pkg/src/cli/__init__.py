"""Command-line workflows with rich output and progress display."""

from .progress import ProgressTracker, replication_progress
from .workflows import (
    load_experiment,
    run_estimate,
    run_experiment_workflow,
    run_meanfield,
    run_oracle,
    run_simulate,
    run_validate,
)

__all__ = [
    "ProgressTracker",
    "replication_progress",
    "load_experiment",
    "run_estimate",
    "run_experiment_workflow",
    "run_meanfield",
    "run_oracle",
    "run_simulate",
    "run_validate",
]
