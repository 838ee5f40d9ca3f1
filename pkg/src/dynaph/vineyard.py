"""Adjacent transpositions on a decomposition and straight-line homotopy schedules."""

from __future__ import annotations

from fractions import Fraction
from itertools import groupby
from typing import Iterable, Sequence

import numpy as np

from .filtration import Filtration, FiltrationError, reindex_bijection
from .matrix import OpCounter
from .reduce import Decomposition


class FaceOrderError(ValueError):
    """The requested reordering would place a coface before one of its faces."""


# case labels, exposed for instrumentation
BOTH_POSITIVE, BOTH_NEGATIVE, NEG_POS, POS_NEG = "pp", "nn", "np", "pn"
case_counts = {BOTH_POSITIVE: 0, BOTH_NEGATIVE: 0, NEG_POS: 0, POS_NEG: 0}


def transpose(dec: Decomposition, i: int) -> Decomposition:
    """Swap filtration positions i and i+1 and repair R = DV in place.

    Performs at most two column additions on each of R and V.
    """
    if not 0 <= i < dec.m - 1:
        raise IndexError(f"position {i} out of range for m={dec.m}")
    D, R, V = dec.D, dec.R, dec.V
    if D.entry(i, i + 1):
        raise FaceOrderError(f"simplex at {i} is a face of the simplex at {i + 1}")

    ci, cj = R.col_at[i], R.col_at[i + 1]
    ri, rj = R.row_at[i], R.row_at[i + 1]
    low_of, pivot_of = dec.low_of, dec.pivot_of
    pos_i, pos_j = low_of[ci] < 0, low_of[cj] < 0
    R.counter.entry_queries += 2
    touched = {ci, cj}
    k, l = pivot_of[ri], pivot_of[rj]
    if k >= 0:
        touched.add(k)
    if l >= 0:
        touched.add(l)
    coupled = V.entry(i, i + 1)

    if pos_i and pos_j:
        case = BOTH_POSITIVE
        if coupled:
            V.add_column(i + 1, i)
        if k >= 0 and l >= 0 and R.entry(i, R.col_pos[l]):
            kp, lp = R.col_pos[k], R.col_pos[l]
            dec.swap(i)
            if kp < lp:
                dec.add(lp, kp)
            else:
                dec.add(kp, lp)
        else:
            dec.swap(i)
    elif not pos_i and not pos_j:
        case = BOTH_NEGATIVE
        if coupled:
            lo_i, lo_j = R.row_pos[low_of[ci]], R.row_pos[low_of[cj]]
            dec.add(i + 1, i)
            dec.swap(i)
            if lo_i > lo_j:
                dec.add(i + 1, i)
        else:
            dec.swap(i)
    elif not pos_i and pos_j:
        case = NEG_POS
        if coupled:
            dec.add(i + 1, i)
            dec.swap(i)
            dec.add(i + 1, i)
        else:
            dec.swap(i)
    else:
        case = POS_NEG
        if coupled:
            V.add_column(i + 1, i)
        dec.swap(i)
    case_counts[case] += 1
    dec.refresh_lows(touched)
    return dec


def run_vineyard(dec: Decomposition, schedule: Iterable[int], check=None) -> tuple[Decomposition, OpCounter]:
    """Apply adjacent transpositions in order; ``check(dec)`` runs after each if given."""
    start = dec.counter
    for i in schedule:
        before = (dec.R.counter.col_ops, dec.V.counter.col_ops)
        transpose(dec, i)
        if dec.R.counter.col_ops - before[0] > 2 or dec.V.counter.col_ops - before[1] > 2:
            raise AssertionError("transposition exceeded two column additions per matrix")
        if check is not None:
            check(dec)
    return dec, dec.counter - start


# -- homotopy schedules ---------------------------------------------------

def straight_line_schedule(K0: Filtration, K1: Filtration) -> list[int]:
    """Adjacent swaps realizing the order change along (1-t) f0 + t f1.

    Inverted pairs are exchanged at their crossing time. Simultaneous
    crossings at a common value are sorted with adjacent swaps, lower
    position first. A pair tied in grade at t = 0 or t = 1 follows the
    tie-break there and the slope in between, so it may be exchanged and
    later restored.
    """
    reindex_bijection(K0, K1)   # validates the simplex sets
    m = K0.m
    f0 = [Fraction(g) for g in K0.grades]
    f1 = [Fraction(K1.grades[K1.index[s]]) for s in K0.simplices]
    tie = [(s.dim, s.vertices) for s in K0.simplices]
    pos1 = [K1.index[s] for s in K0.simplices]

    P = np.asarray(pos1)
    A, B = np.nonzero(np.triu(P[:, None] > P[None, :], 1))
    events = []
    for a, b in zip(A.tolist(), B.tolist()):
        # a precedes b at t=0 and follows it at t=1
        d0 = f0[b] - f0[a]
        d1 = f1[b] - f1[a]
        t = d0 / (d0 - d1) if d0 != d1 else Fraction(0)
        events.append((t, f0[a] + t * (f1[a] - f0[a]), a, b))
    if not events:
        return []
    events.sort(key=lambda e: (e[0], e[1]))

    order = list(range(m))          # element ids by position; ids are K0 positions
    where = list(range(m))
    out: list[int] = []
    for (t, val), grp in groupby(events, key=lambda e: (e[0], e[1])):
        members = set()
        for _, _, a, b in grp:
            members.add(a)
            members.add(b)
        lo = min(where[x] for x in members)
        hi = max(where[x] for x in members)
        # just after t the block is ordered by slope, then by the tie-break key;
        # at t = 1 only the tie-break is left
        if t == 1:
            key = tie.__getitem__
        else:
            key = lambda x: (f1[x] - f0[x], tie[x])
        for p in range(lo + 1, hi + 1):
            q = p
            while q > lo and key(order[q - 1]) > key(order[q]):
                out.append(q - 1)
                order[q - 1], order[q] = order[q], order[q - 1]
                where[order[q - 1]], where[order[q]] = q - 1, q
                q -= 1
    if [pos1[x] for x in order] != list(range(m)):
        raise FiltrationError("homotopy schedule did not reach the target order")
    return out


def schedule_text(schedule: Sequence[int], m: int, one_based: bool = True) -> str:
    off = 1 if one_based else 0
    return f"transpositions m={m} count={len(schedule)}\n" + "".join(f"{i + off}\n" for i in schedule)
