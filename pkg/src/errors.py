"""Unified error handling for netmrt - the networked MRT laboratory."""

from __future__ import annotations

import sys
from typing import Optional

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_INTERRUPTED = 130


class LabError(Exception):
    """Base exception for all netmrt errors."""

    def __init__(self, message: str, emoji: str = "❌", details: Optional[str] = None):
        self.message = message
        self.emoji = emoji
        self.details = details
        super().__init__(message)

    def __str__(self) -> str:
        """Format error with emoji and optional details."""
        result = f"{self.emoji} {self.message}"
        if self.details:
            result += f"\n   Details: {self.details}"
        return result


# ---------------------------------------------------------------------------
# Validation failures (exit 1)
# ---------------------------------------------------------------------------

class ValidationError(LabError):
    """Inputs that fail a precondition before any computation starts."""

    def __init__(self, message: str, details: Optional[str] = None, emoji: str = "⚠️"):
        super().__init__(message, emoji, details)


class GraphError(ValidationError):
    """Errors related to interference graph construction."""

    def __init__(self, message: str, details: Optional[str] = None):
        super().__init__(message, details, "🕸️")


class IndexOutOfRange(GraphError):
    """A unit index outside [0, n)."""

    def __init__(self, index: int, n: int):
        super().__init__(f"Unit index {index} out of range", f"valid indices are 0..{n - 1}")
        self.index = index
        self.n = n


class SelfLoop(GraphError):
    """An edge (i, i)."""

    def __init__(self, index: int):
        super().__init__(f"Self-loop on unit {index}", "interference graphs have no self-edges")
        self.index = index


class InvalidProbability(GraphError):
    """An edge probability outside [0, 1]."""

    def __init__(self, value: float, name: str = "rho"):
        super().__init__(f"Invalid probability {name}={value}", "must lie in [0, 1]")
        self.value = value


class InvalidKernel(GraphError):
    """A graphon kernel that is malformed, asymmetric or outside [0, 1]."""


class LengthMismatch(ValidationError):
    """A per-unit vector whose length does not match the unit count."""

    def __init__(self, what: str, got: int, expected: int):
        super().__init__(f"Length mismatch for {what}: got {got}, expected {expected}")
        self.got = got
        self.expected = expected


class ActivationError(ValidationError):
    """Errors related to activation model specs."""

    def __init__(self, message: str, details: Optional[str] = None):
        super().__init__(message, details, "📈")


class RangeViolation(ActivationError):
    """An activation curve leaves (0, 1) on a unit's feasible range."""


class InvalidSpec(ActivationError):
    """A model spec that cannot be parsed."""


class PolicyOutOfRange(ValidationError):
    """A treatment probability outside the open interval (0, 1)."""

    def __init__(self, message: str = "Treatment probabilities must lie strictly inside (0, 1)",
                 details: Optional[str] = None):
        super().__init__(message, details, "🎯")


class TimeOutOfRange(ValidationError):
    """A decision point outside the recorded horizon."""

    def __init__(self, t: int, horizon: int):
        super().__init__(f"Time {t} out of range", f"valid decision points are 0..{horizon - 1}", "⏱️")
        self.t = t


class TooLarge(ValidationError):
    """An exact computation requested above the unit cap."""

    def __init__(self, n: int, cap: int):
        super().__init__(f"Exact oracle refused n={n}", f"cap is {cap} units (2^n states)", "🧮")
        self.n = n
        self.cap = cap


class ContractionViolation(ValidationError):
    """The contraction constant C = B + L_n D_n is not below one."""

    def __init__(self, constant: float):
        super().__init__(f"Contraction violated: C = {constant:.6g} >= 1",
                         "pass on_violation='warn' to iterate anyway", "🌀")
        self.constant = constant


class ConfigInvalid(ValidationError):
    """Configuration-related errors."""

    def __init__(self, message: str, details: Optional[str] = None):
        super().__init__(message, details, "⚙️")


# ---------------------------------------------------------------------------
# Runtime failures (exit 2)
# ---------------------------------------------------------------------------

class LabRuntimeError(LabError):
    """Failures that happen while computing."""

    def __init__(self, message: str, details: Optional[str] = None, emoji: str = "💥"):
        super().__init__(message, emoji, details)


class NoConvergence(LabRuntimeError):
    """An iterative solver hit its iteration budget."""

    def __init__(self, solver: str, iterations: int, residual: float):
        super().__init__(f"{solver} did not converge after {iterations} iterations",
                         f"last change {residual:.3e}", "🔁")
        self.iterations = iterations
        self.residual = residual


class StaleSolution(LabRuntimeError):
    """A mean-field solution used with a different graph, model or policy."""

    def __init__(self, what: str):
        super().__init__("Mean-field solution does not match its inputs", f"{what} changed", "🧊")


class EstimationError(LabRuntimeError):
    """Errors raised by data-driven estimators."""

    def __init__(self, message: str, details: Optional[str] = None):
        super().__init__(message, details, "📊")


class EmptyCell(EstimationError):
    """A (y, w) cell with zero visits for some unit."""

    def __init__(self, cells: list[tuple[int, int, int]]):
        shown = ", ".join(f"unit {i} (y={y}, w={w})" for i, y, w in cells[:5])
        more = f" and {len(cells) - 5} more" if len(cells) > 5 else ""
        super().__init__(f"{len(cells)} empty cell(s)", shown + more)
        self.cells = cells


class DegenerateDenominator(EstimationError):
    """A plug-in ratio whose denominator is too close to zero."""

    def __init__(self, units: list[int], threshold: float):
        super().__init__(f"Denominator below {threshold:g} for {len(units)} unit(s)",
                         f"units {units[:10]}; the trajectory is probably too short")
        self.units = units


class EmptyEnsemble(LabRuntimeError):
    """A distance requested over zero coupled pairs."""

    def __init__(self):
        super().__init__("Empty ensemble of coupled trajectories")


class ReplicationError(LabRuntimeError):
    """A module error raised inside one replication of an experiment."""

    def __init__(self, replication: int, cause: Exception):
        super().__init__(f"Replication {replication} failed", str(cause))
        self.replication = replication
        self.cause = cause


# Error handling utilities
def exit_code_for(error: BaseException) -> int:
    """Map an exception to the CLI exit status."""
    if isinstance(error, KeyboardInterrupt):
        return EXIT_INTERRUPTED
    if isinstance(error, ReplicationError) and isinstance(error.cause, ValidationError):
        return EXIT_VALIDATION
    if isinstance(error, ValidationError):
        return EXIT_VALIDATION
    return EXIT_RUNTIME


def handle_error(error: BaseException, operation: str = "operation") -> int:
    """Print an error with consistent formatting and return its exit code."""
    if isinstance(error, LabError):
        print(error, file=sys.stderr)
    else:
        print(f"❌ Unexpected error during {operation}: {error}", file=sys.stderr)
    return exit_code_for(error)


def validate_unit_vector(values, n: int, what: str):
    """Coerce to a float vector of length n, raising LengthMismatch otherwise."""
    import numpy as np

    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        arr = np.full(n, float(arr))
    if arr.shape != (n,):
        raise LengthMismatch(what, int(arr.size), n)
    return arr
