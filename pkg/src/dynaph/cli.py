"""Command-line front end: reduce, family, schedule and crocker subcommands.

Exit codes: 0 on success, 2 for bad input, 3 when a decomposition check fails.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .apps import AnnulusConfig, BoidConfig, boid_family, crocker_stack, gen_annulus, gen_boids
from .engine import STRATEGIES, FiltrationFamily, cost_report_csv, run_strategy
from .filtration import FiltrationError, read_filtration
from .moves import donor_trace, move
from .reduce import (InvariantError, decomposition_from_filtration, diagram_csv,
                     extract_pairs, parse_diagram_csv)
from .schedule import greedy_schedule, lcs_sort, lcs_via_lis, parse_schedule_text
from .vineyard import FaceOrderError

log = logging.getLogger("dynaph")

EXIT_INPUT = 2
EXIT_INVARIANT = 3


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("DYNAPH_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ValueError(f"DYNAPH_SEED must be an integer, got {env!r}") from None


def _write(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _float_grid(text: str) -> np.ndarray:
    """``a:b:n`` for n evenly spaced values, otherwise a comma list."""
    if ":" in text:
        a, b, n = text.split(":")
        return np.linspace(float(a), float(b), int(n))
    return np.array([float(x) for x in text.split(",") if x.strip()])


# -- subcommands --------------------------------------------------------------


def cmd_reduce(args) -> int:
    K = read_filtration(args.input)
    dec = decomposition_from_filtration(K)
    if args.check:
        _require(dec, "reduction")
    dgm = extract_pairs(dec, K.grades)
    _write(diagram_csv(dgm, coords=args.coords), args.output)
    return 0


def _require(dec, where: str) -> None:
    from .reduce import validate
    if not validate(dec):
        raise InvariantError(f"decomposition invalid after {where}")


def _family_from_args(args) -> FiltrationFamily:
    if args.gen and args.inputs:
        raise ValueError("give filtration files or --gen, not both")
    if args.gen == "annulus":
        return gen_annulus(args.frames or 10, AnnulusConfig())
    if args.gen == "boids":
        cfg = BoidConfig(samples=args.frames or BoidConfig.samples)
        return boid_family(gen_boids(cfg, seed=_seed(args)), eps_max=args.eps_max)
    if not args.inputs:
        raise ValueError("no filtration files given")
    return FiltrationFamily([read_filtration(p) for p in args.inputs])


def cmd_family(args) -> int:
    fam = _family_from_args(args)
    schedules = None
    if args.schedule:
        if args.strategy not in ("moves", "greedy", "coarse"):
            raise ValueError("--schedule needs a move strategy")
        if len(args.schedule) != len(fam) - 1:
            raise ValueError(f"need {len(fam) - 1} schedule files, got {len(args.schedule)}")
        schedules = []
        for p in args.schedule:
            m, moves = parse_schedule_text(Path(p).read_text())
            if m != fam[0].m:
                raise ValueError(f"{p}: schedule is for m={m}, family has m={fam[0].m}")
            schedules.append(moves)
    res = run_strategy(fam, args.strategy, check=args.check, jobs=args.jobs, schedules=schedules)
    if args.diagrams:
        out = Path(args.diagrams)
        out.mkdir(parents=True, exist_ok=True)
        for k, dgm in enumerate(res.diagrams):
            (out / f"member_{k:04d}.csv").write_text(diagram_csv(dgm, coords=args.coords))
    _write(cost_report_csv([res]), args.output)
    log.info("%s: %d column additions over %d members", res.strategy, res.total.col_ops, len(fam))
    return 0


def cmd_schedule(args) -> int:
    Ka, Kb = read_filtration(args.source), read_filtration(args.target)
    if set(Ka.index) != set(Kb.index):
        raise FiltrationError("the two filtrations have different simplex sets")
    ids = dict(Ka.index)
    p = list(range(Ka.m))
    q = [ids[s] for s in Kb.simplices]
    faces = [[ids[f] for f in s.faces()] for s in Ka.simplices]
    cofaces: list[list[int]] = [[] for _ in range(Ka.m)]
    for c, fs in enumerate(faces):
        for f in fs:
            cofaces[f].append(c)

    def reach(position_of, sid):
        lo = max((position_of(f) for f in faces[sid]), default=-1) + 1
        hi = min((position_of(c) for c in cofaces[sid]), default=Ka.m) - 1
        return lo, hi

    sched = (greedy_schedule if args.greedy else lcs_sort)(p, q, reach)
    # predicted additions per matrix, replayed on a live decomposition
    dec = decomposition_from_filtration(Ka)
    predicted = 0
    for i, j in sched.moves:
        predicted += donor_trace(dec, i, j)
        move(dec, i, j)
    lcs = len(lcs_via_lis(p, q))
    _write(sched.text(), args.output)
    print(f"m={Ka.m} lcs={lcs} d={Ka.m - lcs} predicted_col_ops={predicted}", file=sys.stderr)
    return 0


def cmd_crocker(args) -> int:
    alpha = _float_grid(args.alpha)
    if (alpha < 0).any():
        raise ValueError("--alpha values must be non-negative")
    eps = _float_grid(args.eps)
    if args.diagrams:
        d = Path(args.diagrams)
        if not d.is_dir():
            raise ValueError(f"diagram directory {d} does not exist")
        files = sorted(d.glob("*.csv"))
        if not files:
            raise ValueError(f"no diagram CSVs in {d}")
        dgms = [parse_diagram_csv(f.read_text(), str(f)) for f in files]
    else:
        if args.gen != "boids":
            raise ValueError("crocker needs --diagrams DIR or --gen boids")
        cfg = BoidConfig(samples=args.frames or BoidConfig.samples)
        fam = boid_family(gen_boids(cfg, seed=_seed(args)), eps_max=args.eps_max)
        dgms = run_strategy(fam, "naive", jobs=args.jobs).diagrams
    stack = crocker_stack(dgms, args.dim, eps, alpha)
    _write(stack.csv(), args.output)
    return 0


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dynaph", description="Persistence over families of filtrations.")
    ap.add_argument("--seed", type=int, default=None, help="random seed (falls back to $DYNAPH_SEED, then 0)")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("reduce", help="persistence diagram of one filtration file")
    r.add_argument("input")
    r.add_argument("--coords", choices=("index", "grade"), default="index")
    r.add_argument("--check", action="store_true", help="validate the decomposition")
    r.add_argument("-o", "--output")
    r.set_defaults(func=cmd_reduce)

    f = sub.add_parser("family", help="diagrams and cost report for a family of filtrations")
    f.add_argument("inputs", nargs="*", help="filtration files over one simplex set")
    f.add_argument("--gen", choices=("annulus", "boids"))
    f.add_argument("--frames", type=int, help="members to generate")
    f.add_argument("--eps-max", type=float, default=0.30, help="Rips scale cap for --gen=boids")
    f.add_argument("--strategy", choices=STRATEGIES, default="moves")
    f.add_argument("--schedule", action="append", help="move schedule file per transition (repeatable)")
    f.add_argument("--jobs", type=int, default=1)
    f.add_argument("--check", action="store_true", help="validate after every update")
    f.add_argument("--coords", choices=("index", "grade"), default="index")
    f.add_argument("--diagrams", help="directory to write one diagram CSV per member")
    f.add_argument("-o", "--output", help="cost report CSV (default stdout)")
    f.set_defaults(func=cmd_family)

    s = sub.add_parser("schedule", help="move schedule between two filtration files")
    s.add_argument("source")
    s.add_argument("target")
    s.add_argument("--greedy", action="store_true", help="use the displacement-greedy scheduler")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_schedule)

    c = sub.add_parser("crocker", help="smoothed crocker stack as long-form CSV")
    c.add_argument("--diagrams", help="directory of diagram CSVs, one per time, in name order")
    c.add_argument("--gen", choices=("boids",))
    c.add_argument("--frames", type=int)
    c.add_argument("--eps-max", type=float, default=0.30)
    c.add_argument("--dim", type=int, default=1)
    c.add_argument("--eps", default="0:0.3:31", help="scales as a:b:n or a comma list")
    c.add_argument("--alpha", default="0", help="smoothing values as a:b:n or a comma list")
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_crocker)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InvariantError as e:
        print(f"invariant failure: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except (FiltrationError, FaceOrderError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
