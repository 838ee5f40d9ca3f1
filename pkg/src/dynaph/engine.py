"""Sweep a family of filtrations with moves, vineyards or from-scratch reduction."""

from __future__ import annotations

import concurrent.futures as cf
import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .filtration import Filtration, FiltrationError, boundary_matrix
from .matrix import OpCounter
from .moves import move
from .reduce import (Decomposition, InvariantError, PersistenceDiagram, extract_pairs,
                     reduce, validate)
from .schedule import coarsen_transpositions, greedy_schedule, lcs_sort
from .vineyard import straight_line_schedule, transpose

log = logging.getLogger(__name__)

STRATEGIES = ("naive", "vineyard", "moves", "greedy", "coarse")


@dataclass
class FiltrationFamily:
    """Filtrations over one simplex set; simplex ids are positions in the first member."""

    members: list[Filtration]

    def __post_init__(self):
        if not self.members:
            raise FiltrationError("family is empty")
        first = self.members[0]
        for k, K in enumerate(self.members[1:], start=1):
            if K.m != first.m or set(K.index) != set(first.index):
                raise FiltrationError(f"family member {k} has a different simplex set")

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, k):
        return self.members[k]

    def bijections(self) -> list[list[int]]:
        from .filtration import reindex_bijection
        return [reindex_bijection(a, b) for a, b in zip(self.members, self.members[1:])]


@dataclass
class RunResult:
    strategy: str
    diagrams: list[PersistenceDiagram] = field(default_factory=list)
    cumulative: list[OpCounter] = field(default_factory=list)   # after each member
    steps: list[int] = field(default_factory=list)              # moves or swaps per transition
    budget_violations: int = 0
    schedules: list = field(default_factory=list)

    @property
    def total(self) -> OpCounter:
        return self.cumulative[-1] if self.cumulative else OpCounter()


class _Tracker:
    """Per-simplex face and coface ids, for move admissibility."""

    def __init__(self, K0: Filtration):
        self.ids = dict(K0.index)
        self.faces = [[self.ids[f] for f in s.faces()] for s in K0.simplices]
        self.cofaces: list[list[int]] = [[] for _ in range(K0.m)]
        for c, fs in enumerate(self.faces):
            for f in fs:
                self.cofaces[f].append(c)
        self.m = K0.m

    def word(self, K: Filtration) -> list[int]:
        return [self.ids[s] for s in K.simplices]

    def reach(self, position_of, sid) -> tuple[int, int]:
        lo = max((position_of(f) for f in self.faces[sid]), default=-1) + 1
        hi = min((position_of(c) for c in self.cofaces[sid]), default=self.m) - 1
        return lo, hi


def _check_members(K: Filtration, k: int, tracker: _Tracker) -> None:
    if set(K.index) != set(tracker.ids):
        raise FiltrationError(f"family member {k} has a different simplex set")


def _initial(K0: Filtration) -> Decomposition:
    dec = reduce(boundary_matrix(K0), dims=K0.dims())
    return dec


def _snapshot(res: RunResult, dec: Decomposition, K: Filtration, base: OpCounter) -> None:
    res.diagrams.append(extract_pairs(dec, K.grades))
    res.cumulative.append(base + dec.counter)


def _guarded(dec: Decomposition, check: bool, where: str) -> None:
    if check and not validate(dec):
        raise InvariantError(f"decomposition invalid after {where}")


def run_moves(family: Iterable[Filtration], strategy: str = "moves", check: bool = False,
              schedules: Optional[Sequence[Sequence[tuple[int, int]]]] = None,
              on_member: Optional[Callable[[int, Decomposition], None]] = None) -> RunResult:
    """Reduce the first member once, then reach each next member by moves.

    ``strategy`` picks the scheduler: ``moves`` (LCS order), ``greedy``
    (Spearman proxy) or ``coarse`` (collapsed straight-line transpositions).
    Explicit ``schedules`` override the scheduler per transition. Only the
    current and previous members are held, so ``family`` may be a generator.
    """
    it = iter(family)
    try:
        K_prev = next(it)
    except StopIteration:
        raise FiltrationError("family is empty") from None
    res = RunResult(strategy)
    tracker = _Tracker(K_prev)
    dec = _initial(K_prev)
    base = OpCounter()
    _snapshot(res, dec, K_prev, base)
    if on_member:
        on_member(0, dec)
    for k, K in enumerate(it, start=1):
        _check_members(K, k, tracker)
        cur, target = dec.order(), tracker.word(K)
        if schedules is not None:
            moves = list(schedules[k - 1])
        elif strategy == "greedy":
            moves = greedy_schedule(cur, target, tracker.reach).moves
        elif strategy == "coarse":
            moves = coarsen_transpositions(straight_line_schedule(K_prev, K))
        elif strategy == "moves":
            moves = lcs_sort(cur, target, tracker.reach).moves
        else:
            raise ValueError(f"unknown move strategy {strategy!r}")
        res.schedules.append(moves)
        for i, j in moves:
            r0, v0 = dec.R.counter.col_ops, dec.V.counter.col_ops
            move(dec, i, j)
            budget = 2 * abs(i - j)
            if dec.R.counter.col_ops - r0 > budget or dec.V.counter.col_ops - v0 > budget:
                res.budget_violations += 1
            _guarded(dec, check, f"move ({i}, {j}) toward member {k}")
        if dec.order() != target:
            raise InvariantError(f"schedule toward member {k} did not reach its order")
        res.steps.append(len(moves))
        _snapshot(res, dec, K, base)
        if on_member:
            on_member(k, dec)
        K_prev = K
    return res


def run_vineyard_family(family: Iterable[Filtration], check: bool = False,
                        on_member: Optional[Callable[[int, Decomposition], None]] = None) -> RunResult:
    """Follow the straight-line homotopy between consecutive members by transpositions."""
    it = iter(family)
    try:
        K_prev = next(it)
    except StopIteration:
        raise FiltrationError("family is empty") from None
    res = RunResult("vineyard")
    tracker = _Tracker(K_prev)
    dec = _initial(K_prev)
    base = OpCounter()
    _snapshot(res, dec, K_prev, base)
    if on_member:
        on_member(0, dec)
    for k, K in enumerate(it, start=1):
        _check_members(K, k, tracker)
        swaps = straight_line_schedule(K_prev, K)
        for i in swaps:
            r0, v0 = dec.R.counter.col_ops, dec.V.counter.col_ops
            transpose(dec, i)
            if dec.R.counter.col_ops - r0 > 2 or dec.V.counter.col_ops - v0 > 2:
                res.budget_violations += 1
            _guarded(dec, check, f"transposition {i} toward member {k}")
        if dec.order() != tracker.word(K):
            raise InvariantError(f"homotopy toward member {k} did not reach its order")
        res.steps.append(len(swaps))
        _snapshot(res, dec, K, base)
        if on_member:
            on_member(k, dec)
        K_prev = K
    return res


def _naive_one(K: Filtration) -> tuple[PersistenceDiagram, OpCounter]:
    dec = reduce(boundary_matrix(K), dims=K.dims())
    return extract_pairs(dec, K.grades), dec.counter


def run_naive(family: Iterable[Filtration], jobs: int = 1) -> RunResult:
    """Reduce every member from scratch; diagrams are per member in its own positions."""
    members = list(family)
    if not members:
        raise FiltrationError("family is empty")
    first = set(members[0].index)
    for k, K in enumerate(members[1:], start=1):
        if set(K.index) != first:
            raise FiltrationError(f"family member {k} has a different simplex set")
    if jobs > 1 and len(members) > 1:
        with cf.ProcessPoolExecutor(max_workers=jobs) as ex:
            out = list(ex.map(_naive_one, members))
    else:
        out = [_naive_one(K) for K in members]
    res = RunResult("naive")
    acc = OpCounter()
    for dgm, c in out:
        acc = acc + c
        res.diagrams.append(dgm)
        res.cumulative.append(acc)
        res.steps.append(1)
    return res


def run_strategy(family, strategy: str, check: bool = False, jobs: int = 1, schedules=None) -> RunResult:
    if strategy == "naive":
        return run_naive(family, jobs=jobs)
    if strategy == "vineyard":
        return run_vineyard_family(family, check=check)
    if strategy in ("moves", "greedy", "coarse"):
        return run_moves(family, strategy, check=check, schedules=schedules)
    raise ValueError(f"unknown strategy {strategy!r}; choose from {', '.join(STRATEGIES)}")


def cost_report(results: Sequence[RunResult]) -> list[dict]:
    """Rows of cumulative counters per strategy and member index."""
    rows = []
    for res in results:
        for k, c in enumerate(res.cumulative):
            rows.append({"strategy": res.strategy, "member_index": k, "col_ops_cum": c.col_ops,
                         "queries_cum": c.entry_queries, "perms_cum": c.perms_applied})
    return rows


def cost_report_csv(results: Sequence[RunResult]) -> str:
    lines = ["strategy,member_index,col_ops_cum,queries_cum,perms_cum"]
    for r in cost_report(results):
        lines.append(f"{r['strategy']},{r['member_index']},{r['col_ops_cum']},{r['queries_cum']},{r['perms_cum']}")
    return "\n".join(lines) + "\n"
