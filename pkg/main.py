#!/usr/bin/env python3
"""netmrt - networked micro-randomized trial laboratory - main CLI entry point."""

import argparse
import sys

from src.config import get_config
from src.errors import EXIT_INTERRUPTED, handle_error
from src.logs import configure_logging


def _common(args: argparse.Namespace) -> dict:
    return {
        "config_path": args.config,
        "scenario": args.scenario,
        "seed": args.seed,
        "out": args.out,
        "fmt": args.format,
    }


def cmd_validate(args: argparse.Namespace) -> int:
    """Assumption constants of the configured graph and model."""
    from src.cli import run_validate
    return run_validate(**_common(args))


def cmd_simulate(args: argparse.Namespace) -> int:
    """Simulate and dump one trajectory."""
    from src.cli import run_simulate
    return run_simulate(**_common(args), horizon=args.horizon, replication=args.replication,
                        binary=args.binary)


def cmd_meanfield(args: argparse.Namespace) -> int:
    """Mean-field fixed point, derivative and LTE."""
    from src.cli import run_meanfield
    return run_meanfield(**_common(args), delta=args.delta, v=args.direction, warn=args.warn)


def cmd_oracle(args: argparse.Namespace) -> int:
    """Exact stationary distribution and estimands."""
    from src.cli import run_oracle
    return run_oracle(**_common(args), cap=args.cap)


def cmd_estimate(args: argparse.Namespace) -> int:
    """Run the estimators on a trajectory file."""
    from src.cli import run_estimate
    return run_estimate(args.trajectory, **_common(args))


def cmd_experiment(args: argparse.Namespace) -> int:
    """Replicated experiment with report files."""
    from src.cli import run_experiment_workflow
    return run_experiment_workflow(**_common(args), workers=args.workers)


def cmd_scenarios(args: argparse.Namespace) -> int:
    """List the available scenarios."""
    from src.harness import scenario_names
    for name in scenario_names():
        print(name)
    return 0


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser."""
    config = get_config()

    p = argparse.ArgumentParser(
        description="netmrt - simulate networked micro-randomized trials and validate their estimators",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python3 main.py validate --scenario lde-consistency      # Contraction constants
  python3 main.py oracle --scenario smoke                  # Exact stationary law (n=1)
  python3 main.py meanfield --config run.json --delta 0.05 # Fixed point and LTE
  python3 main.py simulate --scenario smoke --horizon 5000 # Dump a trajectory CSV
  python3 main.py estimate --scenario smoke --trajectory data/runs/smoke/simulate/trajectory_r0.csv
  python3 main.py experiment --scenario lde-consistency --workers 8

Exit codes:
  0 success, 1 validation failure, 2 runtime failure, 130 interrupted
        """
    )
    p.add_argument("--log-level", default=config.log_level, help=f"Logging level (default: {config.log_level})")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Experiment config JSON")
    common.add_argument("--scenario", help="Named scenario (default: smoke)")
    common.add_argument("--seed", type=int, help="Override the config seed")
    common.add_argument("--out", help=f"Output directory (default: under {config.out_dir})")
    common.add_argument("--format", choices=["csv", "json"], help=f"Output format (default: {config.output_format})")

    sub = p.add_subparsers(dest="cmd", required=True, help="Command to run")

    sp = sub.add_parser("validate", parents=[common], help="Report assumption constants; exit 1 if C >= 1")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("simulate", parents=[common], help="Simulate and dump a trajectory")
    sp.add_argument("--horizon", type=int, help="Decision points (default: longest config horizon)")
    sp.add_argument("--replication", type=int, default=0, help="Replication key (default: 0)")
    sp.add_argument("--binary", action="store_true", help="Write the binary format instead of CSV")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("meanfield", parents=[common], help="Mean-field fixed point, derivative and LTE")
    sp.add_argument("--delta", type=float, default=0.1, help="Policy shift for the LTE (default: 0.1)")
    sp.add_argument("--direction", default="ones", choices=["ones", "proportional"],
                    help="Shift direction (default: ones)")
    sp.add_argument("--warn", action="store_true", help="Iterate even when C >= 1")
    sp.set_defaults(func=cmd_meanfield)

    sp = sub.add_parser("oracle", parents=[common], help="Exact stationary distribution and estimands")
    sp.add_argument("--cap", type=int, help=f"Unit cap (default: {config.oracle_cap})")
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("estimate", parents=[common], help="Run estimators on a trajectory file")
    sp.add_argument("--trajectory", required=True, help="Trajectory file (.csv or .bin)")
    sp.set_defaults(func=cmd_estimate)

    sp = sub.add_parser("experiment", parents=[common], help="Replicated experiment with report files")
    sp.add_argument("--workers", type=int, help=f"Replication threads (default: {config.workers})")
    sp.set_defaults(func=cmd_experiment)

    sp = sub.add_parser("scenarios", help="List named scenarios")
    sp.set_defaults(func=cmd_scenarios)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)

    try:
        return int(args.func(args) or 0)
    except KeyboardInterrupt:
        print("\n⚠️  Interrupted by user", file=sys.stderr)
        return EXIT_INTERRUPTED
    except Exception as e:
        return handle_error(e, args.cmd)


if __name__ == "__main__":
    sys.exit(main())
