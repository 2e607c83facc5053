"""Command-line interface.

Subcommands:

``validate <config>``   print the per-condition validation report
``run <config>``        execute the Monte-Carlo experiment and write CSVs
``budget <config>``     print the privacy ledger as CSV on standard output
``spectrum <config>``   print the topology's eigenvalues and norms

Exit codes: 0 on success, 1 on validation failure, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys

from .accountant import PrivacyLedger
from .config import ConfigError, load_config
from .runner import ledger_csv, run_experiment
from .validation import ValidationFailed, resolve_experiment, validate_experiment

__all__ = ["build_parser", "cli", "main"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dpconsensus",
        description="Dynamic average consensus under persistent Laplace privacy noise",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check every assumption of a configuration")
    p_validate.add_argument("config")

    p_run = sub.add_parser("run", help="run the Monte-Carlo experiment")
    p_run.add_argument("config")
    p_run.add_argument("--runs", type=int, default=None, help="override the number of runs")
    p_run.add_argument("--horizon", type=int, default=None, help="override the round horizon")
    p_run.add_argument("--seed", type=int, default=None, help="override the master seed")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.add_argument("--workers", type=int, default=None, help="parallel worker count")
    p_run.add_argument(
        "--override-assumptions",
        action="store_true",
        help="run even when validation fails (guarantees void)",
    )

    p_budget = sub.add_parser("budget", help="print the privacy ledger as CSV")
    p_budget.add_argument("config")
    p_budget.add_argument("--horizon", type=int, default=None, help="ledger horizon")

    p_spectrum = sub.add_parser("spectrum", help="print topology spectrum and norms")
    p_spectrum.add_argument("config")

    return parser


def _cmd_validate(args) -> int:
    report = validate_experiment(load_config(args.config))
    for line in report.lines():
        print(line)
    return 0 if report.all_pass else 1


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    cfg = cfg.replace(
        runs=args.runs, horizon=args.horizon, master_seed=args.seed, workers=args.workers
    )
    manifest = run_experiment(cfg, out_dir=args.out, override_assumptions=args.override_assumptions)
    print(f"wrote {len(manifest['files']) + 1} files (config hash {manifest['config_hash'][:12]})")
    return 0


def _cmd_budget(args) -> int:
    cfg = load_config(args.config)
    resolved = resolve_experiment(cfg)
    if resolved.noise_scale is None:
        print("configuration has no noise section; nothing to account", file=sys.stderr)
        return 1
    if resolved.certificate is None:
        print("no drift certificate; cannot bound sensitivity", file=sys.stderr)
        return 1
    horizon = args.horizon if args.horizon is not None else cfg.horizon
    ledger = PrivacyLedger(
        resolved.drift, resolved.noise_scale, resolved.certificate.l1_constant
    ).accumulate(horizon)
    sys.stdout.write(ledger_csv(ledger))
    return 0


def _cmd_spectrum(args) -> int:
    cfg = load_config(args.config)
    resolved = resolve_experiment(cfg)
    topo = resolved.topology
    print(f"agents: {topo.m}")
    print("eigenvalues (ascending): " + ", ".join(f"{v:.12g}" for v in topo.eigenvalues))
    if topo.m > 1:
        print(f"spectral_gap: {abs(topo.second_largest_eigenvalue):.12g}")
    print(f"mixing_norm: {topo.agreement_norm:.12g}")
    return 0


def cli(argv: list[str] | None = None) -> int:
    """Run the CLI; returns the process exit code instead of exiting."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "budget":
            return _cmd_budget(args)
        if args.command == "spectrum":
            return _cmd_spectrum(args)
    except ValidationFailed as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    parser.error(f"unknown command {args.command!r}")
    return 2


def main() -> None:
    sys.exit(cli())
