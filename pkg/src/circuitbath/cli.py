"""Command line interface.

Subcommands: ``impedance``, ``dispersion``, ``evolve``, ``sweep`` and
``report``.  Exit codes: 0 success, 1 configuration error, 2 numerical
failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .analytics import InsufficientDataError, detect_revival, fit_exponential, time_average
from .config import ConfigError, parse_config
from .runner import (
    EXIT_CONFIG,
    EXIT_IO,
    EXIT_OK,
    format_report,
    read_series_csv,
    run_dispersion,
    run_evolve,
    run_impedance,
    run_sweep,
)


def _add_common(p: argparse.ArgumentParser, seed: bool = False) -> None:
    p.add_argument("--config", required=True, help="path to the run configuration")
    p.add_argument("--out", default=None, help="output directory (overrides output.directory)")
    if seed:
        p.add_argument("--seed", type=int, default=None, help="override the bath seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="circuitbath",
        description="Reactive-circuit heat baths: impedance spectra, exact "
        "single-excitation dynamics and decay/revival/plateau analytics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("impedance", help="sweep the array input impedance to CSV")
    _add_common(p)

    p = sub.add_parser("dispersion", help="write the mode dispersion table to CSV")
    _add_common(p)
    p.add_argument("--n-max", type=int, default=None, help="highest mode index (default N)")

    p = sub.add_parser("evolve", help="integrate the qubit+bath dynamics")
    _add_common(p, seed=True)

    p = sub.add_parser("sweep", help="run evolve over a list of parameter values")
    _add_common(p, seed=True)
    p.add_argument("--param", required=True, help="parameter path, e.g. bath.r")
    p.add_argument("--values", required=True, help="comma-separated value list")
    p.add_argument("--jobs", type=int, default=1, help="max parallel sub-runs")

    p = sub.add_parser("report", help="re-run analytics on an existing series CSV")
    p.add_argument("--series", required=True, help="path to a t,p_e,norm_error CSV")
    p.add_argument("--out", default=None, help="directory for report.txt (default: print only)")
    p.add_argument("--p-hi", type=float, default=1e-1, help="fit window upper population")
    p.add_argument("--p-lo", type=float, default=1e-7, help="fit window lower population")
    p.add_argument("--floor-factor", type=float, default=10.0, help="revival detection factor")
    p.add_argument("--plateau-from", type=float, default=None)
    p.add_argument("--plateau-to", type=float, default=None)
    return parser


def _cmd_report(args: argparse.Namespace) -> int:
    try:
        series = read_series_csv(args.series)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    report: dict = {}
    try:
        fit = fit_exponential(series, args.p_hi, args.p_lo)
        report["gamma_fit"] = fit.gamma_fit
        report["fit_r_squared"] = fit.r_squared
        report["fit_t_lo"], report["fit_t_hi"] = fit.window
    except InsufficientDataError as exc:
        report["fit_skipped"] = str(exc)
    report["revival_time"] = detect_revival(series, args.floor_factor)
    if args.plateau_from is not None and args.plateau_to is not None:
        try:
            report["plateau_mean"] = time_average(series, args.plateau_from, args.plateau_to)
        except InsufficientDataError as exc:
            report["plateau_skipped"] = str(exc)
    text = format_report({}, report)
    print(text, end="")
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.txt").write_text(text)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "report":
        return _cmd_report(args)

    try:
        with open(args.config, "r") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        cfg = parse_config(text)
        if args.command == "impedance":
            return run_impedance(cfg, args.out)
        if args.command == "dispersion":
            return run_dispersion(cfg, args.out, args.n_max)
        if args.command == "evolve":
            return run_evolve(cfg, args.out, args.seed)
        values = [v.strip() for v in args.values.split(",") if v.strip()]
        out = args.out if args.out is not None else cfg.output.directory
        return run_sweep(text, args.param, values, out, jobs=args.jobs, seed_override=args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
