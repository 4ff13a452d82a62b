"""Command-line entry point: ``run``, ``report`` and ``list``."""

from __future__ import annotations

import argparse
import sys

from .harness import ConfigError, build_report, format_listing, load_config, run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_WRITE = 3


def _load(path):
    try:
        return load_config(path)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None


def cmd_run(args) -> int:
    try:
        config = _load(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        summary = run_experiment(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"write error: {exc}", file=sys.stderr)
        return EXIT_WRITE
    print(f"ran {summary.trials_run} trials ({summary.evaluations} evaluations), "
          f"skipped {summary.trials_skipped} completed trials")
    return EXIT_OK


def cmd_report(args) -> int:
    report = build_report(args.dir)
    for problem, backend, dim in report.missing:
        print(f"missing cell: {problem}/{backend}/{dim}d", file=sys.stderr)
    sys.stdout.write(report.to_csv() if args.format == "csv" else report.to_text())
    return EXIT_OK


def cmd_list(args) -> int:
    try:
        config = _load(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    sys.stdout.write(format_listing(config))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="elite-surge", description="Surrogate-assisted EA experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run every missing trial of an experiment")
    run.add_argument("--config", required=True)
    run.set_defaults(func=cmd_run)

    report = sub.add_parser("report", help="significance table from a results directory")
    report.add_argument("--dir", required=True)
    report.add_argument("--format", choices=("text", "csv"), default="text")
    report.set_defaults(func=cmd_report)

    listing = sub.add_parser("list", help="print the benchmark suite of a config")
    listing.add_argument("--config", required=True)
    listing.set_defaults(func=cmd_list)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
