"""Command-line entry point.

Exit status: 0 on success, 1 on a usage or configuration error, 2 when the
run itself fails.  Diagnostics go to stderr; written paths go to stdout.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import harness
from .config import ConfigError, RunConfig, parse_config

log = logging.getLogger("algcomp")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with status 2
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="algcomp", description="Simulate, search and compare causal structure learners.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, help_text, config=True):
        p = sub.add_parser(name, help=help_text)
        if config:
            p.add_argument("--config", required=True, help="run configuration file")
            p.add_argument("--seed", type=int, help="override the master seed")
        return p

    p = add("save", "simulate and save graphs and data sets")
    p.add_argument("--out", required=True, help="directory receiving save1, save2, ...")
    p = add("compare-files", "compare algorithms on saved simulations")
    p.add_argument("--root", required=True, help="directory holding save1, save2, ...")
    p = add("compare-sim", "simulate in memory and compare algorithms")
    p.add_argument("--out", required=True, help="directory receiving Comparison.txt")
    p = add("compare-external", "score externally produced results")
    p.add_argument("--data", required=True, help="directory holding the saved simulations")
    p.add_argument("--out", required=True, help="directory holding results/ and elapsed/")
    p = add("config-report", "list simulations, algorithms, tests, scores and statistics", config=False)
    p.add_argument("--out", required=True, help="file to write")
    return parser


def _load_config(args) -> RunConfig:
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {args.config}: {exc.strerror}") from None
    try:
        cfg = parse_config(text)
    except ConfigError as exc:
        raise UsageError(f"{args.config}: {exc}") from None
    if args.seed is not None:
        cfg.options.master_seed = args.seed
    return cfg


def _dispatch(args) -> Path:
    if args.command == "config-report":
        return harness.configuration_report(args.out)
    cfg = _load_config(args)
    stats, weights, p, opts = cfg.statistics, cfg.weights, cfg.parameters, cfg.options
    if args.command == "save":
        if len(cfg.simulations) != 1:
            raise UsageError("save needs exactly one entry under [simulations]")
        dirs = harness.save_to_files(args.out, cfg.simulations[0], p, opts.master_seed)
        log.info("wrote %d simulation directories", len(dirs))
        return Path(args.out)
    if not cfg.algorithms:
        raise UsageError("no entries under [algorithms]")
    if args.command == "compare-files":
        harness.compare_from_files(args.root, cfg.variants(), stats, weights, p, opts)
        return Path(args.root) / "Comparison.txt"
    if args.command == "compare-sim":
        if not cfg.simulations:
            raise UsageError("no entries under [simulations]")
        harness.compare_from_simulations(args.out, cfg.simulations, cfg.variants(), stats, weights, p, opts)
        return Path(args.out) / "Comparison.txt"
    harness.compare_external(args.data, args.out, cfg.variants(), stats, weights, p, opts)
    return Path(args.out) / "Comparison.txt"


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage() + "algcomp: error: a subcommand is required")
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        out = _dispatch(args)
    except UsageError as exc:
        print(f"algcomp: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"algcomp: {args.command} failed: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


def main() -> None:
    sys.exit(run_cli())
