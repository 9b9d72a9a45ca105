"""Command-line entry point: ``stylized-facts analyze <dir>``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace

from .errors import StylizedFactsError
from .report import AnalysisConfig, load_config, run_batch, write_reports

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _garch_orders(text: str) -> tuple[int, int]:
    try:
        p, q = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected p,q such as 1,1") from None
    return p, q


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stylized-facts",
                                     description="Stylized-facts battery for daily stock data.")
    sub = parser.add_subparsers(dest="command", required=True)
    analyze = sub.add_parser("analyze", help="analyze a directory of OHLCV CSV files")
    analyze.add_argument("directory")
    analyze.add_argument("--config", help="key = value config file")
    analyze.add_argument("--out", default="report", help="output directory (default: report)")
    analyze.add_argument("--max-lag", type=int, help="lags for ACF, PACF and portmanteau tests")
    analyze.add_argument("--garch", type=_garch_orders, metavar="P,Q", help="GARCH orders")
    analyze.add_argument("--seed", type=int, help="seed for optimizer restarts")
    analyze.add_argument("--workers", type=int, help="worker processes (default 1)")
    analyze.add_argument("-v", "--verbose", action="store_true")
    return parser


def _errors(items) -> str:
    return json.dumps({"errors": items}, sort_keys=True)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    try:
        config = load_config(args.config) if args.config else AnalysisConfig()
        overrides = {k: v for k, v in (("max_lag", args.max_lag), ("garch_orders", args.garch),
                                        ("seed", args.seed), ("workers", args.workers))
                     if v is not None}
        config = replace(config, **overrides)
    except (StylizedFactsError, OSError) as exc:
        print(_errors([{"code": getattr(exc, "code", "config_error"), "message": str(exc)}]),
              file=sys.stderr)
        return EXIT_USAGE

    try:
        batch = run_batch(args.directory, config)
        write_reports(batch, args.out)
    except (StylizedFactsError, OSError) as exc:
        print(_errors([{"code": getattr(exc, "code", "io_error"), "message": str(exc)}]),
              file=sys.stderr)
        return EXIT_FAILED

    if batch.failures:
        print(_errors(batch.failures), file=sys.stderr)
    print(f"analyzed {len(batch.reports)} file(s), {len(batch.failures)} failure(s); "
          f"reports in {args.out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
