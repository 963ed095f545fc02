#!/usr/bin/env python3
"""Command-line interface for the scenario runner.

Exit codes: 0 every check passed, 1 a check failed, 2 and above for
configuration, scenario and output errors (see :mod:`exceptions`).
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .config import KNOWN_SCENARIOS, ScenarioConfig, create_example_config, load_config
from .exceptions import QLogicError
from .report import FORMATS, emit, emit_records, emit_table, write_output
from .scenarios import run_scenario

logger = logging.getLogger(__name__)


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(
        level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr
    )


def run_command(args: argparse.Namespace) -> int:
    """Run one scenario and emit its report."""
    config: ScenarioConfig = load_config(args.config).with_overrides(
        seed=args.seed, trials=args.trials
    )
    report = run_scenario(config, workers=args.workers)
    text = emit(report, args.format)

    out = args.out or (Path(config.output) if config.output else None)
    if out is not None:
        write_output(text, out)
        print(f"Report written to: {out} (verdict: {report.verdict})")
    else:
        sys.stdout.write(text)

    if args.table:
        if report.table:
            write_output(emit_table(report), args.table)
        else:
            print(f"Scenario '{report.scenario}' has no joint table", file=sys.stderr)
    if args.records:
        if report.ensembles:
            name, ensemble = next(iter(report.ensembles.items()))
            logger.info("Writing %d trial records from the %s ensemble", len(ensemble), name)
            write_output(emit_records(ensemble), args.records)
        else:
            print(f"Scenario '{report.scenario}' has no trial records", file=sys.stderr)
    return report.exit_code


def validate_command(args: argparse.Namespace) -> int:
    """Validate a configuration file without running it."""
    config = load_config(args.config)
    print(f"✓ {args.config}: scenario '{config.scenario}', digest {config.digest()}")
    return 0


def config_command(args: argparse.Namespace) -> int:
    """Create an example configuration file."""
    if args.path.exists() and not args.force:
        print(f"{args.path} already exists (use --force to overwrite)", file=sys.stderr)
        return 2
    create_example_config(args.path, args.scenario)
    print(f"Created example configuration: {args.path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="snadboy-qlogic",
        description="Truth operators, ideal measurement and EPRB pairs - seeded scenario runner",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  snadboy-qlogic config --scenario eprb eprb.yml   # Create example config
  snadboy-qlogic validate --config eprb.yml        # Check a config
  snadboy-qlogic run --config eprb.yml             # Run, text report
  snadboy-qlogic run --config eprb.yml --format csv --out eprb.csv --table joint.csv
        """,
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for progress, -vv for debug"
    )

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    # Run command
    run_parser = subparsers.add_parser("run", help="Run a scenario")
    run_parser.add_argument("--config", type=Path, required=True, help="Scenario config file")
    run_parser.add_argument("--format", choices=FORMATS, default="text", help="Report format")
    run_parser.add_argument("--seed", type=int, help="Override the configured seed")
    run_parser.add_argument("--trials", type=int, help="Override the configured trial count")
    run_parser.add_argument("--out", type=Path, help="Write the report to a file")
    run_parser.add_argument("--table", type=Path, help="Write the joint-distribution CSV table")
    run_parser.add_argument("--records", type=Path, help="Write the trial records")
    run_parser.add_argument(
        "--workers", type=int, default=1, help="Parallel trial ranges (default: 1)"
    )

    # Validate command
    validate_parser = subparsers.add_parser("validate", help="Validate a scenario config")
    validate_parser.add_argument("--config", type=Path, required=True, help="Scenario config file")

    # Config command
    config_parser = subparsers.add_parser("config", help="Create example configuration file")
    config_parser.add_argument("path", type=Path, help="Where to write the example")
    config_parser.add_argument(
        "--scenario", choices=KNOWN_SCENARIOS, default="eprb", help="Scenario to configure"
    )
    config_parser.add_argument("--force", action="store_true", help="Overwrite an existing file")

    return parser


COMMANDS = {"run": run_command, "validate": validate_command, "config": config_command}


def run(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, dispatch, and map errors to exit codes."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)

    if not args.command:
        parser.print_help()
        return 0

    try:
        return COMMANDS[args.command](args)
    except QLogicError as e:
        print(f"Error: {e}", file=sys.stderr)
        return e.exit_code


def main() -> None:
    """Main CLI entry point."""
    sys.exit(run())


if __name__ == "__main__":
    main()
