"""Experiment configuration files and their validation."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional

from ..errors import ConfigInvalid
from ..estimators.total import GUARDS
from ..utils import digest, read_json

logger = logging.getLogger(__name__)

ESTIMAND_KINDS = ("sde", "lde", "lte", "mean")
TRUTH_MODES = ("auto", "oracle", "meanfield", "none")
OUTPUT_FORMATS = ("csv", "json")
STATIONARY_BURN_IN = 1000


@dataclass(frozen=True)
class EstimandRequest:
    """One estimand to compute on every replication, with its tuning."""

    kind: str
    label: str = ""
    t: Optional[int] = None
    gamma1: float = 0.7
    gamma2: float = 0.3
    delta: float = 0.1
    v: Any = "ones"
    delta_T: Optional[float] = None
    eta: float = 0.05
    kappa: float = 0.05
    m_guard: str = "abs"

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        if self.kind == "sde" and self.t is not None:
            return f"sde_t{self.t}"
        return self.kind

    @property
    def stationary(self) -> bool:
        return self.kind in ("lde", "lte", "mean")

    @classmethod
    def from_spec(cls, spec: Any, where: str, issues: list[str]) -> Optional["EstimandRequest"]:
        if isinstance(spec, str):
            spec = {"kind": spec}
        if not isinstance(spec, Mapping):
            issues.append(f"{where}: expected an object or a name")
            return None
        kind = spec.get("kind")
        if kind not in ESTIMAND_KINDS:
            issues.append(f"{where}: unknown estimand {kind!r} (choose {', '.join(ESTIMAND_KINDS)})")
            return None
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(spec) - known)
        if unknown:
            issues.append(f"{where}: unknown keys {unknown}")
        if spec.get("m_guard", "abs") not in GUARDS:
            issues.append(f"{where}: m_guard must be one of {', '.join(GUARDS)}")
        try:
            return cls(**{k: spec[k] for k in spec if k in known})
        except (TypeError, ValueError) as e:
            issues.append(f"{where}: {e}")
            return None


@dataclass
class ExperimentConfig:
    """Everything run_experiment needs; see scenarios/ for examples."""

    name: str
    graph: dict
    model: dict
    policy: Any = 0.5
    horizons: list[int] = field(default_factory=lambda: [1000])
    burn_in: Optional[int] = None
    replications: int = 20
    seed: int = 0
    init: Optional[dict] = None
    estimands: list[EstimandRequest] = field(default_factory=list)
    truth: str = "auto"
    output: dict = field(default_factory=dict)
    source: Optional[Path] = None

    @property
    def effective_burn_in(self) -> int:
        """Explicit burn-in, else 1000 when a stationary estimand is requested, else 0."""
        if self.burn_in is not None:
            return int(self.burn_in)
        return STATIONARY_BURN_IN if any(e.stationary for e in self.estimands) else 0

    @property
    def output_format(self) -> Optional[str]:
        return self.output.get("format")

    @property
    def output_dir(self) -> Optional[Path]:
        out = self.output.get("dir")
        return Path(out) if out else None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "graph": self.graph,
            "model": self.model,
            "policy": self.policy,
            "horizons": list(self.horizons),
            "burn_in": self.burn_in,
            "replications": self.replications,
            "seed": self.seed,
            "init": self.init,
            "estimands": [{k: v for k, v in e.__dict__.items()} for e in self.estimands],
            "truth": self.truth,
            "output": self.output,
        }

    @property
    def fingerprint(self) -> str:
        return digest("experiment", sorted(self.to_dict().items(), key=lambda kv: kv[0]).__repr__())

    @classmethod
    def from_dict(cls, payload: Mapping, source: Optional[Path] = None) -> "ExperimentConfig":
        """Validate a config document, reporting every problem at once."""
        issues: list[str] = []
        if not isinstance(payload, Mapping):
            raise ConfigInvalid("Experiment config must be a JSON object")

        name = payload.get("name") or (source.stem if source else "experiment")
        if not isinstance(name, str):
            issues.append("name: expected a string")

        graph = payload.get("graph")
        if not isinstance(graph, Mapping) or "kind" not in graph:
            issues.append("graph: expected an object with a 'kind'")
        model = payload.get("model")
        if not isinstance(model, Mapping) or "family" not in model:
            issues.append("model: expected an object with a 'family'")

        horizons = payload.get("horizons", [1000])
        if isinstance(horizons, int) and not isinstance(horizons, bool):
            horizons = [horizons]
        if (not isinstance(horizons, list) or not horizons
                or not all(isinstance(h, int) and not isinstance(h, bool) and h >= 1 for h in horizons)):
            issues.append("horizons: expected a positive integer or a non-empty list of them")
            horizons = []

        burn_in = payload.get("burn_in")
        if burn_in is not None and (not isinstance(burn_in, int) or burn_in < 0):
            issues.append("burn_in: expected a non-negative integer")

        replications = payload.get("replications", 20)
        if not isinstance(replications, int) or replications < 0:
            issues.append("replications: expected a non-negative integer")

        seed = payload.get("seed", 0)
        if not isinstance(seed, int) or seed < 0:
            issues.append("seed: expected a non-negative integer")

        raw_estimands = payload.get("estimands", [])
        if not isinstance(raw_estimands, list) or not raw_estimands:
            issues.append("estimands: expected a non-empty list")
            raw_estimands = []
        estimands = [EstimandRequest.from_spec(e, f"estimands[{k}]", issues) for k, e in enumerate(raw_estimands)]
        names = [e.name for e in estimands if e is not None]
        if len(set(names)) != len(names):
            issues.append(f"estimands: duplicate names {sorted({x for x in names if names.count(x) > 1})}; "
                          "set a distinct 'label'")

        truth = payload.get("truth", "auto")
        if truth not in TRUTH_MODES:
            issues.append(f"truth: expected one of {', '.join(TRUTH_MODES)}")

        output = payload.get("output", {}) or {}
        if not isinstance(output, Mapping):
            issues.append("output: expected an object")
            output = {}
        elif output.get("format") not in (None, *OUTPUT_FORMATS):
            issues.append(f"output.format: expected one of {', '.join(OUTPUT_FORMATS)}")

        unknown = sorted(set(payload) - {"name", "graph", "model", "policy", "horizons", "burn_in",
                                         "replications", "seed", "init", "estimands", "truth", "output",
                                         "description"})
        if unknown:
            issues.append(f"unknown keys {unknown}")

        if issues:
            raise ConfigInvalid("Experiment config is invalid", "\n   - ".join([""] + issues).lstrip("\n"))

        return cls(
            name=name,
            graph=dict(graph),
            model=dict(model),
            policy=payload.get("policy", 0.5),
            horizons=sorted(set(horizons)),
            burn_in=burn_in,
            replications=replications,
            seed=seed,
            init=payload.get("init"),
            estimands=[e for e in estimands if e is not None],
            truth=truth,
            output=dict(output),
            source=source,
        )

    @classmethod
    def load(cls, path: Path) -> "ExperimentConfig":
        path = Path(path)
        payload = read_json(path)
        if payload is None:
            raise ConfigInvalid(f"Cannot read experiment config {path}", "file missing or not valid JSON")
        return cls.from_dict(payload, source=path)
