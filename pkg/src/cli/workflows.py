"""Command workflows: load a config, run one stage of the lab, render and save results."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Optional

import numpy as np
from rich.console import Console
from rich.table import Table

from ..config import get_config
from ..errors import EXIT_OK, EXIT_VALIDATION, ConfigInvalid, ReplicationError
from ..harness import ExperimentConfig, load_scenario, prepare, run_experiment, stationary_truths
from ..utils import format_float, write_json
from .progress import ProgressTracker, replication_progress

logger = logging.getLogger(__name__)

# results go to stdout; logs and progress bars to stderr
stdout = Console()


def load_experiment(config_path: Optional[str] = None, scenario: Optional[str] = None,
                    seed: Optional[int] = None) -> ExperimentConfig:
    """Config file, else named scenario, else the smoke scenario; --seed overrides."""
    if config_path and scenario:
        raise ConfigInvalid("Give either --config or --scenario, not both")
    if config_path:
        config = ExperimentConfig.load(Path(config_path))
    else:
        config = load_scenario(scenario or "smoke")
    if seed is not None:
        if seed < 0:
            raise ConfigInvalid(f"--seed must be non-negative, got {seed}")
        config.seed = int(seed)
    return config


def _resolve_out(out: Optional[str], config: ExperimentConfig, stage: str) -> Path:
    if out:
        return Path(out)
    return config.output_dir or get_config().out_dir / config.name / stage


def _format(fmt: Optional[str], config: ExperimentConfig) -> str:
    return fmt or config.output_format or get_config().output_format


def _print_json(payload) -> None:
    stdout.print_json(json.dumps(payload, sort_keys=True, default=_jsonable))


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return str(value)


def _constants_table(report) -> Table:
    table = Table(title="📐 Assumption constants", show_header=True, header_style="bold magenta")
    table.add_column("Constant", style="cyan")
    table.add_column("Value", justify="right")
    table.add_column("Check", justify="center")
    table.add_row("L_n", format_float(report.L_n), "")
    table.add_row("B", format_float(report.B), "")
    table.add_row("D_n", str(report.D_n), "")
    table.add_row("L2_n", format_float(report.L2_n), "")
    table.add_row("C = B + L_n D_n", format_float(report.C),
                  "[green]✓ C < 1[/green]" if report.contraction_ok else "[red]✗ C ≥ 1[/red]")
    table.add_row("C_L2 = L2_n D_n²", format_float(report.C_L2),
                  "[green]✓[/green]" if report.smoothness_ok else "[yellow]rough[/yellow]")
    return table


def run_validate(config_path=None, scenario=None, seed=None, out=None, fmt=None) -> int:
    """Print the assumption constants; exit 1 when the contraction condition fails."""
    from ..meanfield import mean_field_bounds

    config = load_experiment(config_path, scenario, seed)
    setup = prepare(config)
    report = setup.report
    bounds = mean_field_bounds(report, setup.graph.n)
    payload = {
        "experiment": config.name,
        "n": setup.graph.n,
        "graph_hash": setup.graph.fingerprint,
        "model_hash": setup.model.fingerprint,
        "constants": report.to_dict(),
        "mean_field_bounds": bounds.to_dict() if bounds else None,
    }
    if _format(fmt, config) == "json":
        _print_json(payload)
    else:
        stdout.print(_constants_table(report))
        if bounds:
            stdout.print(f"[dim]mean-field bounds: W_L1 ≤ {bounds.w_l1:.4g}, "
                         f"W_dE(1) ≤ {bounds.w_de1:.4g}, W_dE(3) ≤ {bounds.w_de3:.4g}[/dim]")
    if out:
        write_json(Path(out) / "assumptions.json", payload)

    if not report.contraction_ok:
        stdout.print(f"[red]⚠️  Contraction condition violated: C = {report.C:.6g} ≥ 1[/red]")
        return EXIT_VALIDATION
    return EXIT_OK


def run_simulate(config_path=None, scenario=None, seed=None, out=None, fmt=None,
                 horizon: Optional[int] = None, replication: int = 0, binary: bool = False) -> int:
    """Simulate one trajectory and dump it."""
    from ..simulate import simulate, write_trajectory_binary, write_trajectory_csv

    config = load_experiment(config_path, scenario, seed)
    setup = prepare(config)
    T = int(horizon or max(config.horizons))
    traj = simulate(setup.graph, setup.model, setup.policy, T, config.seed, setup.init,
                    replication=replication, burn_in=config.effective_burn_in)
    out_dir = _resolve_out(out, config, "simulate")
    if binary:
        path = write_trajectory_binary(traj, out_dir / f"trajectory_r{replication}.bin")
    else:
        path = write_trajectory_csv(traj, out_dir / f"trajectory_r{replication}.csv")

    summary = {
        "trajectory": str(path),
        "T": traj.T,
        "n": traj.n,
        "seed": traj.seed,
        "replication": traj.replication,
        "burn_in": traj.burn_in,
        "mean_outcome": float(traj.Y[1:].mean()) if traj.T else float(traj.Y.mean()),
        "treated_share": float(traj.W.mean()) if traj.T else None,
    }
    if _format(fmt, config) == "json":
        _print_json(summary)
    else:
        table = Table(title="🎲 Simulation", show_header=False)
        table.add_column("Field", style="cyan")
        table.add_column("Value")
        for key, value in summary.items():
            table.add_row(key, format_float(value) if isinstance(value, float) else str(value))
        stdout.print(table)
    return EXIT_OK


def run_meanfield(config_path=None, scenario=None, seed=None, out=None, fmt=None,
                  delta: float = 0.1, v: str = "ones", warn: bool = False) -> int:
    """Mean-field fixed point, its derivative and the mean-field LTE."""
    from ..meanfield import mf_derivative, mf_fixed_point, mf_lte, mf_lte_linear

    config = load_experiment(config_path, scenario, seed)
    setup = prepare(config)
    on_violation = "warn" if warn else "raise"
    g, m, policy = setup.graph, setup.model, setup.policy
    sol = mf_fixed_point(g, m, policy, on_violation=on_violation, report=setup.report)
    p = mf_derivative(g, m, policy, v, sol=sol, on_violation=on_violation)
    lte = mf_lte(g, m, policy, delta, v, sol=sol, on_violation=on_violation)
    linear = mf_lte_linear(g, m, policy, delta, v, sol=sol, on_violation=on_violation)

    out_dir = _resolve_out(out, config, "meanfield")
    path = sol.save(out_dir / "meanfield.json")
    payload = {
        "solution": str(path),
        "iterations": sol.iterations,
        "residual": sol.residual,
        "mean_P_star": float(sol.P_star.mean()),
        "mean_derivative": float(p.mean()),
        "delta": delta,
        "direction": v,
        "lte": lte,
        "lte_linear": linear,
    }
    if _format(fmt, config) == "json":
        _print_json(payload)
    else:
        table = Table(title="🧲 Mean-field system", show_header=True, header_style="bold magenta")
        table.add_column("Quantity", style="cyan")
        table.add_column("Value", justify="right")
        table.add_row("iterations", str(sol.iterations))
        table.add_row("residual", f"{sol.residual:.3e}")
        table.add_row("mean P*", format_float(payload["mean_P_star"]))
        table.add_row("mean dP*/dπ along v", format_float(payload["mean_derivative"]))
        table.add_row(f"LTE (Δ={delta})", format_float(lte))
        table.add_row(f"linearised LTE (Δ={delta})", format_float(linear))
        stdout.print(table)
        if g.n <= 20:
            per_unit = Table(title="Per-unit fixed point")
            per_unit.add_column("unit", justify="right")
            per_unit.add_column("P*", justify="right")
            per_unit.add_column("Q*", justify="right")
            per_unit.add_column("p*", justify="right")
            for i in range(g.n):
                per_unit.add_row(str(i), format_float(sol.P_star[i]), format_float(sol.Q_star[i]),
                                 format_float(p[i]))
            stdout.print(per_unit)
    return EXIT_OK


def run_oracle(config_path=None, scenario=None, seed=None, out=None, fmt=None,
               cap: Optional[int] = None) -> int:
    """Exact stationary distribution and the estimand truths of the config."""
    from ..oracle import exact_expected_sde, exact_mean, exact_stationary, write_distribution_csv

    config = load_experiment(config_path, scenario, seed)
    setup = prepare(config, cap=cap)
    dist = exact_stationary(setup.graph, setup.model, setup.policy, cap=cap)
    means = exact_mean(dist)
    setup.truth_mode = "oracle"
    truths = stationary_truths(config, setup, cap=cap, base=dist)

    out_dir = _resolve_out(out, config, "oracle")
    path = write_distribution_csv(dist, out_dir / "distribution.csv")
    payload = {
        "distribution": str(path),
        "iterations": dist.iterations,
        "residual": dist.residual,
        "stationary_mean": float(means.mean()),
        "unit_means": means,
        "expected_sde": exact_expected_sde(dist, setup.graph, setup.model),
        "truths": truths,
    }
    if _format(fmt, config) == "json":
        _print_json(payload)
    else:
        table = Table(title="🔮 Exact oracle", show_header=True, header_style="bold magenta")
        table.add_column("Quantity", style="cyan")
        table.add_column("Value", justify="right")
        table.add_row("states", str(2 ** dist.n))
        table.add_row("iterations", str(dist.iterations))
        table.add_row("residual", f"{dist.residual:.3e}")
        table.add_row("stationary mean", format_float(payload["stationary_mean"]))
        table.add_row("expected SDE", format_float(payload["expected_sde"]))
        for name, value in truths.items():
            table.add_row(f"exact {name}", format_float(value))
        stdout.print(table)
    return EXIT_OK


def run_estimate(trajectory: str, config_path=None, scenario=None, seed=None, out=None, fmt=None) -> int:
    """Apply the config's estimators to a trajectory file."""
    from ..estimators import report_lde, report_lte, report_sde
    from ..simulate import read_trajectory_binary, read_trajectory_csv

    config = load_experiment(config_path, scenario, seed)
    setup = prepare(config)
    path = Path(trajectory)
    traj = read_trajectory_binary(path) if path.suffix == ".bin" else read_trajectory_csv(path)

    reports = []
    for req in config.estimands:
        if req.kind == "sde":
            reports.append(report_sde(traj, req.t))
        elif req.kind == "lde":
            reports.append(report_lde(traj, req.gamma1, req.gamma2))
        elif req.kind == "lte":
            reports.append(report_lte(traj, setup.graph, None, req.delta, req.v, req.delta_T,
                                      req.eta, req.kappa, req.m_guard))
        else:
            logger.info("estimand '%s' has no trajectory estimator here; skipped", req.name)

    records = [r.to_dict() for r in reports]
    if out:
        out_path = Path(out) / "estimates.jsonl"
        out_path.parent.mkdir(parents=True, exist_ok=True)
        with out_path.open("w", encoding="utf-8") as f:
            for record in records:
                f.write(json.dumps(record, sort_keys=True, default=_jsonable) + "\n")

    if _format(fmt, config) == "json":
        _print_json(records)
    else:
        table = Table(title=f"📈 Estimates for {path.name}", show_header=True, header_style="bold magenta")
        table.add_column("Estimand", style="cyan")
        table.add_column("Value", justify="right")
        table.add_column("Min cell visits", justify="right")
        table.add_column("Flags")
        for r in reports:
            flags = ", ".join(f"{k}={v}" for k, v in r.flags.items() if v) or "-"
            table.add_row(r.estimand, format_float(r.value),
                          "-" if r.min_cell_visits is None else str(r.min_cell_visits), flags)
        stdout.print(table)
    return EXIT_OK


def _summary_table(summary) -> Table:
    table = Table(title="📊 |error| by estimand and horizon", show_header=True, header_style="bold magenta")
    for column in ("estimand", "horizon", "count", "median_estimate", "truth", "median_abs_error", "iqr_abs_error"):
        table.add_column(column, justify="left" if column == "estimand" else "right")
    for row in summary.itertuples(index=False):
        table.add_row(row.estimand, str(row.horizon), str(row.count), format_float(row.median_estimate),
                      format_float(row.truth), format_float(row.median_abs_error),
                      format_float(row.iqr_abs_error))
    return table


def run_experiment_workflow(config_path=None, scenario=None, seed=None, out=None, fmt=None,
                            workers: Optional[int] = None) -> int:
    """run_experiment with the pipeline display and a replication progress bar."""
    tracker = ProgressTracker()
    config = load_experiment(config_path, scenario, seed)
    tracker.show_welcome(config.name, f"{config.replications} replications, horizons {config.horizons}")
    tracker.show_step_overview()

    tracker.start_step("Generate")
    setup = prepare(config)
    tracker.complete_step("Generate")

    tracker.start_step("Simulate")
    out_dir = Path(out) if out else None
    try:
        with replication_progress(config.replications) as advance:
            result = run_experiment(config, out_dir=out_dir, output_format=fmt, workers=workers,
                                    on_progress=advance, setup=setup)
    except ReplicationError as e:
        tracker.show_error("Simulate", f"replication {e.replication} stopped the run")
        tracker.show_completion_summary(False)
        raise
    for step in ("Simulate", "Estimate", "Compare", "Report"):
        tracker.complete_step(step)

    if _format(fmt, config) == "json":
        _print_json(json.loads(result.summary.to_json(orient="records")))
    else:
        stdout.print(_summary_table(result.summary))
        stdout.print(f"[dim]truth: {result.assumptions['truth_mode']}, "
                     f"C = {result.assumptions['constants']['C']:.4g}[/dim]")
    tracker.show_completion_summary(True, str(result.out_dir))
    return EXIT_OK
