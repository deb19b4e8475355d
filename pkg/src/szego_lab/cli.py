"""Command-line entry point: ``szego-lab <command> --config <path> ...``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .commands import COMMANDS, run
from .config import ConfigError, load_config
from .report import RunReport

log = logging.getLogger("szego_lab")


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="szego-lab",
        description="Orthonormal polynomials for perturbed Szego measures.",
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="YAML experiment config (optional for selftest)")
    p.add_argument("--out", help="directory for report.json, CSV tables and figures")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, default=1, help="worker threads (default 1)")
    p.add_argument("--grid", type=int, help="grid size N (power of two)")
    p.add_argument("--precision", type=int, help="working precision in bits")
    p.add_argument("--degree", type=int, help="maximum polynomial degree")
    p.add_argument("--no-figures", action="store_true", help="skip PNG output")
    return p


def _setup_logging():
    level = os.environ.get("SZEGO_LAB_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv=None) -> int:
    _setup_logging()
    args = _build_parser().parse_args(argv)
    if args.jobs < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return 2
    overrides = {"seed": args.seed, "grid": args.grid,
                 "precision": args.precision, "degree": args.degree}
    cfg = None
    if args.config is None and args.command != "selftest":
        print("error: --config is required for this command", file=sys.stderr)
        return 2
    if args.config is not None:
        try:
            cfg = load_config(args.config, overrides)
        except OSError as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return 2
        except ConfigError as exc:
            for e in exc.errors:
                print(f"config error: {e}", file=sys.stderr)
            report = RunReport(args.command, None, config_error=True,
                               error={"module": "szego_lab.config", "type": "ConfigError",
                                      "message": str(exc)})
            _emit(report, args)
            return 2

    report = run(args.command, cfg, jobs=args.jobs)
    _emit(report, args)
    for c in report.checks:
        if not c["passed"]:
            log.warning("check failed: %s (value %s)", c["name"], c["value"])
    if report.error:
        print(f"error in {report.error['module']}: {report.error['message']}", file=sys.stderr)
    return report.exit_code


def _emit(report: RunReport, args):
    if args.out:
        report.write(args.out)
        if not args.no_figures and report.config is not None:
            from .plotting import render
            render(report, args.out)
    else:
        sys.stdout.write(report.to_json())


if __name__ == "__main__":
    sys.exit(main())
