"""``aggrewrite-bench``: run an encoding family and summarise the results."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .report import format_table, write_figures
from .runner import (
    DEFAULT_TIME_LIMIT,
    HAMILTONIAN_TIME_LIMIT,
    SolverLaunchFailure,
    expand_instances,
    read_csv,
    run_matrix,
    write_csv,
)
from .stats import IncompleteMatrix, compute_stats

PRESETS = {"default": DEFAULT_TIME_LIMIT, "hamiltonian": HAMILTONIAN_TIME_LIMIT}


def load_config(path) -> dict:
    """Read a JSON matrix description; relative paths resolve against its folder.

    Keys: encodings (list), instances (directory or list), solver (command),
    time_limit (seconds) or preset ("default"/"hamiltonian"), parallelism,
    labels (optional encoding -> display name).
    """
    path = Path(path)
    raw = json.loads(path.read_text(encoding="utf-8"))
    root = path.parent

    def resolve(p):
        p = Path(p)
        return str(p if p.is_absolute() else root / p)

    instances = raw["instances"]
    instances = resolve(instances) if isinstance(instances, str) else [resolve(p) for p in instances]
    limit = raw.get("time_limit", PRESETS[raw.get("preset", "default")])
    labels = {resolve(k): v for k, v in raw.get("labels", {}).items()}
    return {
        "encodings": [resolve(p) for p in raw["encodings"]],
        "instances": expand_instances(instances),
        "solver": raw.get("solver", "clingo"),
        "time_limit": float(limit),
        "parallelism": int(raw.get("parallelism", 1)),
        "labels": labels,
    }


def _summarise(records, figures, labels=None):
    stats = compute_stats(records)
    print(format_table(stats, labels))
    if figures:
        for path in write_figures(stats, records, figures, labels):
            print(f"figure: {path}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="aggrewrite-bench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run the matrix described by a JSON config")
    run_p.add_argument("config")
    run_p.add_argument("--csv", default="results.csv", help="where to write per-run records")
    run_p.add_argument("--figures", metavar="DIR", help="directory for PNG figures")
    stats_p = sub.add_parser("stats", help="summarise an existing results CSV")
    stats_p.add_argument("csv")
    stats_p.add_argument("--figures", metavar="DIR", help="directory for PNG figures")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")

    if args.command == "stats":
        try:
            _summarise(read_csv(args.csv), args.figures)
        except IncompleteMatrix as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        return 0

    config = load_config(args.config)
    try:
        records = run_matrix(config["encodings"], config["instances"], config["solver"],
                             config["time_limit"], config["parallelism"])
    except SolverLaunchFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    write_csv(records, args.csv)
    print(f"records: {args.csv}")
    _summarise(records, args.figures, config["labels"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
