"""Command-line front end: ``hbspace analyze|verify|reduce|scan|moments``."""

from __future__ import annotations

import argparse
import sys

from .reports import (
    ConfigError,
    RunConfig,
    emit_report,
    run_analyze,
    run_moments,
    run_reduce,
    run_scan,
    run_verify,
)

RUNNERS = {"analyze": run_analyze, "verify": run_verify, "reduce": run_reduce,
           "moments": run_moments}


def _tolerance(text: str):
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad tolerance value in {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hbspace", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("analyze", "verify", "reduce", "scan", "moments"):
        p = sub.add_parser(name)
        if name == "scan":
            p.add_argument("--corpus", required=True, help="directory of symbol JSON files")
            p.add_argument("--jobs", type=int, default=1)
        else:
            p.add_argument("--symbol", required=True, help="symbol JSON file")
        p.add_argument("--truncation", type=int, default=256, metavar="N")
        p.add_argument("--grid", type=int, default=4096, metavar="M")
        p.add_argument("--orbit", type=int, default=30, metavar="L")
        p.add_argument("--cutoff", type=int, default=None, metavar="K")
        p.add_argument("--tol", type=_tolerance, action="append", default=[],
                       metavar="NAME=VALUE")
        p.add_argument("--report", default=None, help="write the JSON report here")
        p.add_argument("--csv", default=None, help="directory for CSV companions")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        cfg = RunConfig(mode=args.command, truncation=args.truncation, grid=args.grid,
                        orbit=args.orbit, cutoff=args.cutoff, tolerances=dict(args.tol),
                        jobs=getattr(args, "jobs", 1))
        if args.command == "scan":
            report = run_scan(cfg, args.corpus)
        else:
            report = RUNNERS[args.command](cfg, args.symbol)
    except ConfigError as exc:
        print(f"hbspace: {exc}", file=sys.stderr)
        return 2
    emit_report(report, args.report, args.csv)
    if args.report is None:
        print(report.to_json())
    return report.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
