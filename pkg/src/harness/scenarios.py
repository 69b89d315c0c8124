"""Named experiment scenarios shipped with the lab."""

from __future__ import annotations

import copy
import logging
from pathlib import Path
from typing import Optional

from ..config import get_config
from ..errors import ConfigInvalid
from ..utils import read_json
from .config import ExperimentConfig

logger = logging.getLogger(__name__)

# n = 1 with a constant model: every estimand has a closed form
_CONSTANT = {"family": "affine", "decomposition": {"a": 0.1, "b": 0.2, "c": 0.3, "d": 0.1}}

BUILTIN_SCENARIOS: dict[str, dict] = {
    "smoke": {
        "name": "smoke",
        "description": "Single unit, constant model; exact truths are closed-form.",
        "graph": {"kind": "empty", "n": 1},
        "model": _CONSTANT,
        "policy": {"kind": "uniform", "p": 0.5},
        "horizons": [2000, 20000],
        "replications": 4,
        "seed": 1,
        "estimands": [
            {"kind": "sde"},
            {"kind": "lde", "gamma1": 0.6, "gamma2": 0.5},
            {"kind": "lte", "delta": 0.1},
            {"kind": "mean"},
        ],
        "truth": "oracle",
    },
    "lde-consistency": {
        "name": "lde-consistency",
        "description": "Plug-in LDE against the exact oracle on a dense six-unit graph.",
        "graph": {"kind": "erdos_renyi", "n": 6, "rho": 0.5, "seed": 7},
        "model": {
            "family": "affine",
            "decomposition": {"a": {"base": 0.1, "slope": 0.002}, "b": 0.2, "c": 0.3, "d": 0.1},
        },
        "policy": {"kind": "uniform", "p": 0.5},
        "horizons": [1000, 10000, 100000],
        "replications": 20,
        "seed": 2024,
        "estimands": [{"kind": "lde", "gamma1": 0.7, "gamma2": 0.3}],
        "truth": "oracle",
    },
    "lte-estimation": {
        "name": "lte-estimation",
        "description": "Guarded LTE estimator against the mean-field LTE on a sparse hundred-unit graph.",
        "graph": {"kind": "erdos_renyi", "n": 100, "rho": 0.08, "seed": 11},
        "model": {
            "family": "affine",
            "decomposition": {"a": {"base": 0.1, "slope": 0.01}, "b": 0.2, "c": 0.3, "d": 0.1},
        },
        "policy": {"kind": "uniform", "p": 0.5},
        "horizons": [100000],
        "replications": 20,
        "seed": 8,
        "estimands": [{"kind": "lte", "delta": 0.1, "v": "ones", "eta": 0.05, "kappa": 0.05}],
        "truth": "meanfield",
    },
    "sde-ipw": {
        "name": "sde-ipw",
        "description": "IPW short-term direct effect against the per-state truth.",
        "graph": {"kind": "erdos_renyi", "n": 100, "rho": 0.1, "seed": 3},
        "model": {
            "family": "affine",
            "decomposition": {"a": {"base": 0.1, "slope": 0.01}, "b": 0.2, "c": 0.3, "d": 0.1},
        },
        "policy": {"kind": "uniform", "p": 0.5},
        "horizons": [1, 200],
        "replications": 20,
        "seed": 5,
        "estimands": [{"kind": "sde", "label": "sde_first", "t": 0}, {"kind": "sde"}],
        "truth": "auto",
    },
    "meanfield-gap": {
        "name": "meanfield-gap",
        "description": "Simulated outcome rate against the mean-field fixed point on a complete graph.",
        "graph": {"kind": "complete", "n": 40},
        "model": {
            "family": "affine",
            "decomposition": {"a": {"base": 0.1, "slope": 0.0075}, "b": 0.2, "c": 0.3, "d": 0.1},
        },
        "policy": {"kind": "uniform", "p": 0.5},
        "horizons": [20000],
        "replications": 20,
        "seed": 40,
        "estimands": [{"kind": "mean"}],
        "truth": "meanfield",
    },
}


def scenario_names() -> list[str]:
    """Built-in names plus any extra JSON files in the scenarios directory."""
    names = set(BUILTIN_SCENARIOS)
    directory = get_config().scenarios_dir
    if directory.exists():
        names.update(p.stem for p in directory.glob("*.json"))
    return sorted(names)


def load_scenario(name: str, directory: Optional[Path] = None) -> ExperimentConfig:
    """A scenario file from the scenarios directory, else the built-in of that name."""
    directory = directory or get_config().scenarios_dir
    path = Path(directory) / f"{name}.json"
    if path.exists():
        payload = read_json(path)
        if payload is None:
            raise ConfigInvalid(f"Scenario file {path} is not valid JSON")
        logger.debug("scenario %s loaded from %s", name, path)
        return ExperimentConfig.from_dict(payload, source=path)
    if name not in BUILTIN_SCENARIOS:
        raise ConfigInvalid(f"Unknown scenario '{name}'", f"available: {', '.join(scenario_names())}")
    return ExperimentConfig.from_dict(copy.deepcopy(BUILTIN_SCENARIOS[name]))
