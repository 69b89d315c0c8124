"""Parse model spec documents into activation models."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Mapping, Union

import numpy as np

from ..errors import InvalidSpec, RangeViolation
from ..graph import InterferenceGraph
from ..utils import read_json
from .model import (
    MARGIN,
    ActivationModel,
    AffineActivation,
    LogisticActivation,
    TabulatedActivation,
)

logger = logging.getLogger(__name__)

CORNER_KEYS = ("00", "01", "10", "11")
FAMILIES = ("affine", "logistic", "tabulated")


def _number(value: Any, where: str) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError) as e:
        raise InvalidSpec(f"Expected a number at {where}", f"got {value!r}") from e
    if not np.isfinite(out):
        raise InvalidSpec(f"Non-finite number at {where}", f"got {value!r}")
    return out


def _affine_pair(raw: Any, where: str) -> tuple[float, float]:
    if isinstance(raw, Mapping):
        return _number(raw.get("base", 0.0), f"{where}.base"), _number(raw.get("slope", 0.0), f"{where}.slope")
    return _number(raw, where), 0.0


def _decomposition_curves(raw: Mapping, where: str) -> dict[str, tuple[float, float]]:
    """Affine a, b, c, d terms to the four corner curves."""
    missing = [k for k in "abcd" if k not in raw]
    if missing:
        raise InvalidSpec(f"Decomposition at {where} is missing {', '.join(missing)}")
    a, b, c, d = (np.array(_affine_pair(raw[k], f"{where}.{k}")) for k in "abcd")
    return {
        "00": tuple(a),
        "01": tuple(a + b),
        "10": tuple(a + c),
        "11": tuple(a + b + c + d),
    }


def _parse_curve(family: str, raw: Any, where: str):
    if family == "affine":
        return _affine_pair(raw, where)
    if family == "logistic":
        if not isinstance(raw, Mapping):
            raise InvalidSpec(f"Logistic curve at {where} must be an object", "keys theta0 and thetaz")
        return _number(raw.get("theta0", 0.0), f"{where}.theta0"), _number(raw.get("thetaz", 0.0), f"{where}.thetaz")
    values = raw if isinstance(raw, (list, tuple)) else [raw]
    if not values:
        raise InvalidSpec(f"Tabulated curve at {where} is empty")
    return [_number(v, f"{where}[{k}]") for k, v in enumerate(values)]


def _corner_block(family: str, block: Mapping, where: str, partial: bool) -> dict[str, Any]:
    """Curves of one spec block keyed by 'yw'."""
    if "decomposition" in block:
        if family != "affine":
            raise InvalidSpec(f"'decomposition' at {where} is only valid for the affine family")
        return _decomposition_curves(block["decomposition"], f"{where}.decomposition")

    curves = block.get("curves", {})
    if not isinstance(curves, Mapping):
        raise InvalidSpec(f"'curves' at {where} must be an object keyed by '00', '01', '10', '11'")
    unknown = sorted(set(curves) - set(CORNER_KEYS))
    if unknown:
        raise InvalidSpec(f"Unknown curve keys at {where}", f"{unknown}; keys are 'yw' bit pairs")
    if not partial:
        missing = [k for k in CORNER_KEYS if k not in curves]
        if missing:
            raise InvalidSpec(f"Missing curves at {where}", f"{missing}")
    return {k: _parse_curve(family, v, f"{where}.curves.{k}") for k, v in curves.items()}


def _unit_index(key: Any, n: int) -> int:
    try:
        i = int(key)
    except (TypeError, ValueError) as e:
        raise InvalidSpec(f"Unit override key {key!r} is not an integer") from e
    if not 0 <= i < n:
        raise InvalidSpec(f"Unit override {i} out of range", f"valid units are 0..{n - 1}")
    return i


def _assemble(family: str, per_unit: list[dict[str, Any]], scales: np.ndarray) -> ActivationModel:
    n = len(per_unit)
    if family == "tabulated":
        width = max(len(curves[k]) for curves in per_unit for k in CORNER_KEYS)
        table = np.empty((n, 2, 2, width))
        lengths = np.empty(n, dtype=np.int64)
        for i, curves in enumerate(per_unit):
            unit_len = {len(curves[k]) for k in CORNER_KEYS}
            if len(unit_len) != 1:
                raise InvalidSpec(f"Tabulated curves of unit {i} have different lengths", f"{sorted(unit_len)}")
            lengths[i] = unit_len.pop()
            for k in CORNER_KEYS:
                values = curves[k]
                padded = values + [values[-1]] * (width - len(values))
                table[i, int(k[0]), int(k[1]), :] = padded
        return TabulatedActivation(table, lengths)

    first = np.empty((n, 2, 2))
    second = np.empty((n, 2, 2))
    for i, curves in enumerate(per_unit):
        for k in CORNER_KEYS:
            first[i, int(k[0]), int(k[1])], second[i, int(k[0]), int(k[1])] = curves[k]
    if family == "affine":
        return AffineActivation(first, second)
    return LogisticActivation(first, second, scales)


def check_range(m: ActivationModel, degrees: np.ndarray) -> None:
    """Raise RangeViolation when some curve leaves (0, 1) on [0, degree(i)]."""
    values = m.corner_values(degrees)
    bad = ~((values >= MARGIN) & (values <= 1.0 - MARGIN))
    if not bad.any():
        return
    i, y, w, k = (int(x) for x in np.argwhere(bad)[0])
    z = float(m.feasible_grid(degrees)[i, k])
    raise RangeViolation(
        f"f_{i}({y},{w},{z:g}) = {values[i, y, w, k]:.6g} is outside (0, 1)",
        f"{int(bad.sum())} grid point(s) violate the range on the feasible z-range [0, degree(i)]",
    )


def build_activation(spec: Union[Mapping, str, Path], g: InterferenceGraph) -> ActivationModel:
    """Build and range-check an activation model for the units of ``g``.

    Args:
        spec: Model spec document (or a path to a JSON file holding one).
        g: Graph whose unit count and degrees define the feasible z-ranges.

    Returns:
        The validated model.
    """
    if isinstance(spec, (str, Path)):
        path = Path(spec)
        loaded = read_json(path)
        if loaded is None:
            raise InvalidSpec(f"Cannot read model spec {path}")
        spec = loaded
    if not isinstance(spec, Mapping):
        raise InvalidSpec("Model spec must be a JSON object")

    family = spec.get("family")
    if family not in FAMILIES:
        raise InvalidSpec(f"Unknown activation family {family!r}", f"choose one of {', '.join(FAMILIES)}")

    base = _corner_block(family, spec, "model", partial=False)
    per_unit = [dict(base) for _ in range(g.n)]
    scales = np.full(g.n, _number(spec.get("scale", 1.0), "model.scale"))

    overrides = spec.get("units", {}) or {}
    if not isinstance(overrides, Mapping):
        raise InvalidSpec("'units' must be an object keyed by unit index")
    for key, block in overrides.items():
        i = _unit_index(key, g.n)
        if not isinstance(block, Mapping):
            raise InvalidSpec(f"Override for unit {i} must be an object")
        per_unit[i].update(_corner_block(family, block, f"model.units.{i}", partial=True))
        if "scale" in block:
            scales[i] = _number(block["scale"], f"model.units.{i}.scale")

    if family == "logistic" and np.any(scales <= 0):
        raise InvalidSpec("Logistic scale must be positive", f"got {scales[scales <= 0][:5].tolist()}")

    model = _assemble(family, per_unit, scales)
    check_range(model, g.degrees)
    logger.debug("built %s", model)
    return model


def model_hash(m: ActivationModel) -> str:
    return m.fingerprint
