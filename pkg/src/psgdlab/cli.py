"""Command line entry point: ``psgdlab <command> <config> [options]``."""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .config import SCHEMA, parse_config, resolve
from .errors import LabError
from .experiments import RUNNERS, write_report

COMMANDS = {
    "run": "run",
    "example41": "example41",
    "fig1": "fig1",
    "rates": "rates",
    "robbins-monro": "robbins_monro",
    "constants": "constants",
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="psgdlab", description="Projected SGD experiments with Goldstein-cone stationarity.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"{name} experiment")
        p.add_argument("config", help="JSON configuration file")
        p.add_argument("--out", metavar="DIR", help="output directory")
        p.add_argument("--seeds", metavar="K", type=int, help="number of Monte Carlo runs")
        p.add_argument("--master-seed", metavar="S", type=int, help="master seed")
        p.add_argument("--threads", metavar="T", type=int, help="worker threads")
        p.add_argument("--h", metavar="H", type=float, help="flow integrator step")
    sub.add_parser("schema", help="print the configuration schema")
    return parser


def _apply_overrides(cfg, args):
    raw = dict(cfg.raw)
    seeds = dict(raw["seeds"])
    if args.seeds is not None:
        seeds["count"] = args.seeds
    if args.master_seed is not None:
        seeds["master"] = args.master_seed
    raw["seeds"] = seeds
    if args.threads is not None:
        raw["threads"] = args.threads
    if args.h is not None:
        raw["h"] = args.h
    if args.out is not None:
        raw["output_dir"] = args.out
    raw["experiment"] = COMMANDS[args.command]
    # overrides go through the same validation as the file
    return resolve(raw, source=cfg.source)


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "schema":
        print(json.dumps(SCHEMA, indent=2))
        return 0
    try:
        cfg = _apply_overrides(parse_config(args.config), args)
        rep = RUNNERS[cfg["experiment"]](cfg)
        out = write_report(rep, cfg, cfg.output_dir)
    except LabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for c in rep.checks:
        print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}")
    print(f"wrote {out}")
    return 0 if rep.all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
