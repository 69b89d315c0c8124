"""Activation models, their decomposition and assumption constants."""

from .model import (
    MARGIN,
    ActivationModel,
    AffineActivation,
    LogisticActivation,
    TabulatedActivation,
    eval_f,
    eval_abcd,
    eval_f_deriv,
)
from .constants import AssumptionReport, assumption_constants, self_feedback_bound
from .spec import build_activation, check_range, model_hash

__all__ = [
    'MARGIN',
    'ActivationModel',
    'AffineActivation',
    'LogisticActivation',
    'TabulatedActivation',
    'eval_f',
    'eval_abcd',
    'eval_f_deriv',
    'AssumptionReport',
    'assumption_constants',
    'self_feedback_bound',
    'build_activation',
    'check_range',
    'model_hash',
]
