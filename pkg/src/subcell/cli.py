"""Command-line driver: ``subcell {rasterize,reconstruct,converge,evolve,bench}``.

Exit codes: 0 success, 2 usage or parse error, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from .config import NAMED_SHAPES, ExperimentConfig, load_shape
from .errors import InvalidShapeError, NumericDegeneracyError, SchemeInstabilityError
from .fvs import TransportConfig, evolve
from .grid import rasterize, read_grid, write_grid
from .pipeline import METHODS, MethodSpec, convergence_study, reconstruct, timing_study
from .svg import reconstruction_svg

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


class UsageError(Exception):
    pass


def _ints(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _methods(values):
    out = []
    for v in values or []:
        out += [m.strip() for m in v.split(",") if m.strip()]
    for m in out:
        if m not in METHODS:
            raise UsageError(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
    return out or None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subcell", description="Sub-cell interface reconstruction experiments.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config JSON; flags override its fields")
    common.add_argument("--seed", type=int, help="recorded in output headers and seeds numpy")
    common.add_argument("--out", help="output path ('-' for stdout where a single file is written)")
    sub = parser.add_subparsers(dest="command", required=True)

    shape_help = f"named shape ({', '.join(NAMED_SHAPES)}) or shape JSON file"

    p = sub.add_parser("rasterize", parents=[common], help="exact cell averages of a shape")
    p.add_argument("--shape", help=shape_help)
    p.add_argument("--l", type=int, help="cells per side")

    p = sub.add_parser("reconstruct", parents=[common], help="fit every singular cell of a grid file")
    p.add_argument("--grid", required=True, help="grid file written by 'rasterize'")
    p.add_argument("--method", action="append", help="reconstruction method")
    p.add_argument("--workers", type=int)

    p = sub.add_parser("converge", parents=[common], help="global L1 error against resolution")
    p.add_argument("--shape", help=shape_help)
    p.add_argument("--method", action="append", help="method(s), repeatable or comma-separated")
    p.add_argument("--resolutions", type=_ints, help="e.g. 10,20,30,40,60")
    p.add_argument("--workers", type=int)

    p = sub.add_parser("evolve", parents=[common], help="finite-volume transport along +x")
    p.add_argument("--shape", help=shape_help)
    p.add_argument("--method", action="append")
    p.add_argument("--l", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--snapshots", type=_ints, help="steps to draw (initial and final always drawn)")

    p = sub.add_parser("bench", parents=[common], help="median per-cell fit time")
    p.add_argument("--shape", help=shape_help)
    p.add_argument("--method", action="append")
    p.add_argument("--l", type=int)
    p.add_argument("--reps", type=int)
    return parser


def _config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()
    cfg = cfg.override(
        shape=getattr(args, "shape", None),
        methods=_methods(getattr(args, "method", None)),
        l=getattr(args, "l", None),
        resolutions=getattr(args, "resolutions", None),
        steps=getattr(args, "steps", None),
        reps=getattr(args, "reps", None),
        workers=getattr(args, "workers", None),
        seed=args.seed,
        snapshots=getattr(args, "snapshots", None),
    )
    if cfg.l < 1 or cfg.steps < 0 or cfg.reps < 1:
        raise UsageError("need l >= 1, steps >= 0 and reps >= 1")
    if cfg.workers < 1:
        cfg.workers = os.cpu_count() or 1
    return cfg


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", newline=""), True


def _write_table(path, cfg, header, rows):
    fh, close = _open_out(path)
    try:
        fh.write("# " + cfg.header() + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if close:
            fh.close()


def _single_method(cfg):
    if len(cfg.methods) != 1:
        raise UsageError("this command takes exactly one --method")
    return MethodSpec(cfg.methods[0])


def cmd_rasterize(args, cfg):
    grid = rasterize(load_shape(cfg.shape), cfg.l)
    fh, close = _open_out(args.out)
    try:
        write_grid(grid, fh)
    finally:
        if close:
            fh.close()


def cmd_reconstruct(args, cfg):
    try:
        with open(args.grid) as fh:
            grid = read_grid(fh)
    except ValueError as exc:
        raise UsageError(f"{args.grid}: {exc}") from exc
    spec = _single_method(cfg)
    rec = reconstruct(grid, spec, workers=cfg.workers)
    doc = {
        "config": json.loads(cfg.header()),
        "method": spec.name,
        "l": grid.l,
        "cells": [
            {"cell": [i, j], "method": r.method, "model": r.model.to_json(), "fallback": r.fallback}
            for (i, j), r in sorted(rec.records.items())
        ],
    }
    prefix = Path(args.out or f"reconstruction-{spec.name}")
    prefix.parent.mkdir(parents=True, exist_ok=True)
    prefix.with_suffix(".json").write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    prefix.with_suffix(".svg").write_text(reconstruction_svg(rec))
    print(f"{len(rec.records)} singular cells -> {prefix.with_suffix('.json')}, {prefix.with_suffix('.svg')}")


def cmd_converge(args, cfg):
    shape = load_shape(cfg.shape)
    rows = []
    for name in cfg.methods:
        res = convergence_study(shape, name, cfg.resolutions, workers=cfg.workers, tol=cfg.tol)
        for l, e in zip(res.resolutions, res.errors):
            rows.append([l, name, repr(e), repr(res.rate)])
        print(f"{name:30s} rate {res.rate:.3f} over 1/h in {res.fit_resolutions}")
    _write_table(args.out, cfg, ["resolution", "method", "error", "slope"], rows)


def cmd_evolve(args, cfg):
    spec = _single_method(cfg)
    shape = load_shape(cfg.shape)
    tc = TransportConfig(spec, cfg.l, steps=cfg.steps)
    snaps = sorted({0, cfg.steps, *cfg.snapshots} & set(range(cfg.steps + 1)))
    res = evolve(shape, tc, schedule=snaps, error_schedule=range(cfg.steps + 1), tol=cfg.tol)
    out = Path(args.out or f"evolve-{spec.name}")
    out.mkdir(parents=True, exist_ok=True)
    rows = [[n, repr(e), repr(res.masses[n])] for n, e in res.errors]
    _write_table(out / "errors.csv", cfg, ["step", "error", "mass"], rows)
    first = res.snapshots[0]
    for n, rec in res.snapshots.items():
        (out / f"step-{n:05d}.svg").write_text(reconstruction_svg(rec, reference=first))
    print(f"final L1 error {res.errors[-1][1]:.6e} after {cfg.steps} steps -> {out}")


def cmd_bench(args, cfg):
    shape = load_shape(cfg.shape)
    med = timing_study(shape, cfg.methods, cfg.l, cfg.reps)
    rows = [[name, cfg.l, cfg.reps, repr(t)] for name, t in med.items()]
    for name, t in med.items():
        print(f"{name:30s} {t * 1e6:10.1f} us/cell")
    _write_table(args.out, cfg, ["method", "l", "reps", "median_seconds"], rows)


COMMANDS = {
    "rasterize": cmd_rasterize,
    "reconstruct": cmd_reconstruct,
    "converge": cmd_converge,
    "evolve": cmd_evolve,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(args)
        np.random.seed(cfg.seed)
        COMMANDS[args.command](args, cfg)
    except (UsageError, InvalidShapeError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"subcell {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # config/grid parse failures and bad parameters
        print(f"subcell {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SchemeInstabilityError, NumericDegeneracyError, ArithmeticError) as exc:
        print(f"subcell {args.command}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
