"""Common utility functions for netmrt."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Optional

import numpy as np


def ensure_directory(path: Path) -> None:
    """Create directory and all parent directories if they don't exist."""
    path.mkdir(parents=True, exist_ok=True)


def read_json(path: Path) -> Optional[dict]:
    """Read and parse a JSON file, returning None on error."""
    try:
        with path.open("r", encoding="utf-8") as f:
            return json.load(f)
    except (OSError, ValueError):
        return None


def write_json(path: Path, payload: Any) -> Path:
    """Write a JSON document with stable key order."""
    ensure_directory(path.parent)
    with path.open("w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True, default=_json_default)
        f.write("\n")
    return path


def _json_default(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def digest(*parts: Any) -> str:
    """SHA-256 hex digest over strings, numbers and numpy arrays."""
    h = hashlib.sha256()
    for part in parts:
        if isinstance(part, np.ndarray):
            arr = np.ascontiguousarray(part)
            h.update(str(arr.dtype).encode())
            h.update(str(arr.shape).encode())
            h.update(arr.tobytes())
        else:
            h.update(repr(part).encode())
        h.update(b"|")
    return h.hexdigest()


def format_float(value: Optional[float]) -> str:
    """Compact float formatting used in tables and CSV comments."""
    if value is None:
        return "-"
    return f"{value:.6g}"
