"""End-to-end experiments: generate, simulate, estimate, compare to truth, report."""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
import pandas as pd

from ..activation import AssumptionReport, ActivationModel, assumption_constants, build_activation
from ..config import ORACLE_HARD_MAX, get_config
from ..errors import ConfigInvalid, LabError, ReplicationError
from ..estimators import EstimateReport, phat_all, report_lde, report_lte, report_sde, trajectory_key
from ..graph import InterferenceGraph, build_graph
from ..meanfield import direction, mean_field_bounds, mf_fixed_point, mf_lde, mf_lte
from ..oracle import ExactDistribution, exact_lde, exact_lte, exact_mean, exact_sde_states, exact_stationary
from ..simulate import InitSpec, PolicyVector, Trajectory, policy_from_spec, simulate
from ..utils import ensure_directory, write_json
from .config import EstimandRequest, ExperimentConfig

logger = logging.getLogger(__name__)

COLUMNS = [
    "replication", "horizon", "estimand", "estimate", "truth", "error", "abs_error",
    "truth_mode", "min_cell_visits", "flags", "tuning", "seed", "burn_in",
    "trajectory", "graph_hash", "model_hash",
]
SUMMARY_COLUMNS = [
    "estimand", "horizon", "count", "median_estimate", "truth",
    "median_abs_error", "q25_abs_error", "q75_abs_error", "iqr_abs_error",
]

ProgressCallback = Callable[[int, int], None]


@dataclass
class Setup:
    """Validated inputs shared by every replication."""

    graph: InterferenceGraph
    model: ActivationModel
    policy: PolicyVector
    init: InitSpec
    report: AssumptionReport
    truth_mode: str
    truths: dict[str, float] = field(default_factory=dict)


@dataclass
class ExperimentResult:
    estimates: pd.DataFrame
    summary: pd.DataFrame
    assumptions: dict
    out_dir: Path
    files: dict[str, Path]


def resolve_truth_mode(requested: str, n: int, cap: int) -> str:
    """``auto`` picks the exact oracle up to the cap and the mean-field system above it."""
    if requested == "auto":
        return "oracle" if n <= cap else "meanfield"
    if requested == "oracle" and n > cap:
        raise ConfigInvalid(f"Oracle ground truth requested for n={n} units",
                            f"the exact oracle is capped at {cap} units; use truth 'meanfield' or 'auto'")
    return requested


def prepare(config: ExperimentConfig, cap: Optional[int] = None) -> Setup:
    """Build and validate every spec before any simulation starts.

    ``cap`` overrides the configured oracle unit cap when resolving the truth mode.
    """
    g = build_graph(config.graph)
    m = build_activation(config.model, g)
    policy = policy_from_spec(config.policy, g.n)
    init = InitSpec.from_spec(config.init)
    for req in config.estimands:
        if req.kind == "sde" and req.t is not None and not all(0 <= req.t < T for T in config.horizons):
            raise ConfigInvalid(f"Estimand '{req.name}' asks for t={req.t}",
                                f"t must be below every horizon {config.horizons}")
        if req.kind == "lte" and not isinstance(req.v, str):
            direction_vector = np.asarray(req.v, dtype=float)
            if direction_vector.shape != (g.n,):
                raise ConfigInvalid(f"Estimand '{req.name}' direction has {direction_vector.size} entries",
                                    f"expected {g.n}")
    report = assumption_constants(m, g)
    cap = get_config().oracle_cap if cap is None else min(int(cap), ORACLE_HARD_MAX)
    mode = resolve_truth_mode(config.truth, g.n, cap)
    return Setup(graph=g, model=m, policy=policy, init=init, report=report, truth_mode=mode)


def _direction(req: EstimandRequest, policy: PolicyVector):
    return direction(req.v, policy) if isinstance(req.v, str) else np.asarray(req.v, dtype=float)


def stationary_truths(config: ExperimentConfig, setup: Setup, cap: Optional[int] = None,
                      base: Optional[ExactDistribution] = None) -> dict[str, float]:
    """Truth for every stationary estimand, computed once per experiment.

    In oracle mode ``cap`` reaches every exact solve and ``base`` reuses an
    already computed stationary law for the configured policy.
    """
    requests = [r for r in config.estimands if r.stationary]
    if setup.truth_mode == "none" or not requests:
        return {}
    g, m, policy = setup.graph, setup.model, setup.policy
    truths: dict[str, float] = {}

    if setup.truth_mode == "oracle":
        if base is None:
            base = exact_stationary(g, m, policy, cap=cap)
        for req in requests:
            if req.kind == "lde":
                truths[req.name] = exact_lde(g, m, policy, req.gamma1, req.gamma2, cap=cap, base=base)
            elif req.kind == "lte":
                shifted = policy.shifted(req.delta, _direction(req, policy))
                truths[req.name] = exact_lte(g, m, shifted, policy, cap=cap)
            else:
                truths[req.name] = float(exact_mean(base).mean())
    else:
        sol = mf_fixed_point(g, m, policy, on_violation="warn", report=setup.report)
        for req in requests:
            if req.kind == "lde":
                truths[req.name] = mf_lde(g, m, policy, req.gamma1, req.gamma2, sol=sol, on_violation="warn")
            elif req.kind == "lte":
                truths[req.name] = mf_lte(g, m, policy, req.delta, _direction(req, policy),
                                          sol=sol, on_violation="warn")
            else:
                truths[req.name] = float(sol.P_star.mean())
    logger.info("%s truths: %s", setup.truth_mode,
                ", ".join(f"{k}={v:.6g}" for k, v in truths.items()))
    return truths


def _estimate(req: EstimandRequest, traj: Trajectory, setup: Setup) -> tuple[EstimateReport, float, str]:
    """One estimate with its truth and the label of the truth used."""
    if req.kind == "sde":
        est = report_sde(traj, req.t, setup.policy)
        if setup.truth_mode == "none":
            return est, math.nan, "none"
        rows = traj.Y[:traj.T] if req.t is None else traj.Y[req.t:req.t + 1]
        return est, float(exact_sde_states(setup.graph, setup.model, rows).mean()), "state"

    if req.kind == "lde":
        est = report_lde(traj, req.gamma1, req.gamma2)
    elif req.kind == "lte":
        est = report_lte(traj, setup.graph, setup.policy, req.delta, req.v, req.delta_T,
                         req.eta, req.kappa, req.m_guard)
    else:
        est = EstimateReport(estimand="mean", value=float(phat_all(traj).mean()),
                             trajectory=trajectory_key(traj), seed=traj.seed, replication=traj.replication)
    return est, setup.truths.get(req.name, math.nan), setup.truth_mode


def _rows_for_replication(config: ExperimentConfig, setup: Setup, replication: int) -> list[dict]:
    longest = simulate(setup.graph, setup.model, setup.policy, max(config.horizons), config.seed,
                       setup.init, replication=replication, burn_in=config.effective_burn_in)
    rows = []
    for T in config.horizons:
        traj = longest if T == longest.T else longest.prefix(T)
        for req in config.estimands:
            est, truth, mode = _estimate(req, traj, setup)
            error = est.value - truth
            rows.append({
                "replication": replication,
                "horizon": T,
                "estimand": req.name,
                "estimate": est.value,
                "truth": truth,
                "error": error,
                "abs_error": abs(error),
                "truth_mode": mode,
                "min_cell_visits": est.min_cell_visits,
                "flags": json.dumps(est.flags, sort_keys=True),
                "tuning": json.dumps(est.tuning, sort_keys=True),
                "seed": config.seed,
                "burn_in": traj.burn_in,
                "trajectory": est.trajectory,
                "graph_hash": traj.graph_hash,
                "model_hash": traj.model_hash,
            })
    return rows


def summarize(estimates: pd.DataFrame) -> pd.DataFrame:
    """Median and IQR of |error| per estimand and horizon."""
    if estimates.empty:
        return pd.DataFrame(columns=SUMMARY_COLUMNS)
    grouped = estimates.groupby(["estimand", "horizon"], sort=True)
    summary = grouped.agg(
        count=("estimate", "size"),
        median_estimate=("estimate", "median"),
        truth=("truth", "first"),
        median_abs_error=("abs_error", "median"),
        q25_abs_error=("abs_error", lambda s: s.quantile(0.25)),
        q75_abs_error=("abs_error", lambda s: s.quantile(0.75)),
    ).reset_index()
    summary["iqr_abs_error"] = summary["q75_abs_error"] - summary["q25_abs_error"]
    return summary[SUMMARY_COLUMNS]


def _assumptions_payload(config: ExperimentConfig, setup: Setup) -> dict:
    bounds = mean_field_bounds(setup.report, setup.graph.n)
    return {
        "experiment": config.name,
        "config": config.to_dict(),
        "config_fingerprint": config.fingerprint,
        "n": setup.graph.n,
        "edges": setup.graph.edge_count,
        "graph_hash": setup.graph.fingerprint,
        "model_hash": setup.model.fingerprint,
        "burn_in": config.effective_burn_in,
        "constants": setup.report.to_dict(),
        "mean_field_bounds": bounds.to_dict() if bounds else None,
        "truth_mode": setup.truth_mode,
        "truths": {k: (None if math.isnan(v) else v) for k, v in sorted(setup.truths.items())},
    }


def run_experiment(config: ExperimentConfig, out_dir: Optional[Path] = None,
                   output_format: Optional[str] = None, workers: Optional[int] = None,
                   on_progress: Optional[ProgressCallback] = None,
                   setup: Optional[Setup] = None) -> ExperimentResult:
    """Run every replication of an experiment and write its report files.

    Args:
        config: Validated experiment configuration.
        out_dir: Output directory; the config's, else ``<out_dir>/<name>``.
        output_format: ``csv`` or ``json``; ``json`` adds estimates.jsonl.
        workers: Replication threads, the configured worker count by default.
        on_progress: Called with (finished, total) after each replication.
        setup: A result of ``prepare(config)`` to reuse instead of rebuilding the inputs.

    Returns:
        The estimates, the summary and the written paths.
    """
    settings = get_config()
    if setup is None:
        setup = prepare(config)
    setup.truths = stationary_truths(config, setup)
    out_dir = Path(out_dir or config.output_dir or settings.out_dir / config.name)
    output_format = output_format or config.output_format or settings.output_format
    workers = max(1, int(workers or settings.workers))

    logger.info("experiment %s: n=%d, C=%.4g, %d replications x %d horizons, truth=%s",
                config.name, setup.graph.n, setup.report.C, config.replications,
                len(config.horizons), setup.truth_mode)

    by_replication: dict[int, list[dict]] = {}
    total = config.replications
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(_rows_for_replication, config, setup, r): r for r in range(total)}
        for future in as_completed(futures):
            r = futures[future]
            try:
                by_replication[r] = future.result()
            except LabError as e:
                for pending in futures:
                    pending.cancel()
                raise ReplicationError(r, e) from e
            if on_progress:
                on_progress(len(by_replication), total)

    rows = [row for r in sorted(by_replication) for row in by_replication[r]]
    estimates = pd.DataFrame(rows, columns=COLUMNS)
    summary = summarize(estimates)
    assumptions = _assumptions_payload(config, setup)

    ensure_directory(out_dir)
    files = {
        "estimates": out_dir / "estimates.csv",
        "summary": out_dir / "summary.csv",
        "assumptions": out_dir / "assumptions.json",
    }
    estimates.to_csv(files["estimates"], index=False, float_format="%.12g")
    summary.to_csv(files["summary"], index=False, float_format="%.12g")
    write_json(files["assumptions"], assumptions)
    if output_format == "json":
        files["jsonl"] = out_dir / "estimates.jsonl"
        with files["jsonl"].open("w", encoding="utf-8") as f:
            for row in rows:
                record = dict(row)
                record["flags"] = json.loads(record["flags"])
                record["tuning"] = json.loads(record["tuning"])
                record = {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in record.items()}
                f.write(json.dumps(record, sort_keys=True) + "\n")

    logger.info("wrote %s", ", ".join(str(p) for p in files.values()))
    return ExperimentResult(estimates=estimates, summary=summary, assumptions=assumptions,
                            out_dir=out_dir, files=files)
