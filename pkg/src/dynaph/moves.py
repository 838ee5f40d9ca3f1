"""Move operations: relocate one simplex across an interval, repairing once at the end.

Both directions run in two stages. First, entries of V that the relocation
would push below the diagonal are cancelled. Then the permutation is
applied and R is made reduced again. Only the final state is guaranteed
valid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .reduce import Decomposition
from .vineyard import FaceOrderError


@dataclass
class MoveTrace:
    """Column sets a move touches. ``cost`` is the predicted additions per matrix."""

    i: int
    j: int
    cancel: list = field(default_factory=list)    # V-row (right) or V-column (left) cancellations
    conflicts: list = field(default_factory=list)  # R columns whose low collides after the move
    cost: int = 0


def _check_move_faces(dec: Decomposition, i: int, j: int) -> None:
    D = dec.D
    if not (0 <= i < dec.m and 0 <= j < dec.m):
        raise IndexError(f"move ({i}, {j}) out of range for m={dec.m}")
    if i < j:
        hit = D.nonzero_in_row(i, i + 1, j + 1)
        if hit:
            raise FaceOrderError(f"simplex at {i} is a face of the simplex at {hit[0]}")
    elif j < i:
        col = D.column(i)
        hit = [r for r in col if j <= r < i]
        if hit:
            raise FaceOrderError(f"simplex at {min(hit)} is a face of the simplex at {i}")


def _restore_right(dec: Decomposition, cols: list[int]) -> tuple[set, set]:
    """Sweep a donor through ``cols`` (positions, ascending); return the final donor.

    Each visited column receives the current donor. When the column's old low
    was smaller, the old column becomes the donor. Lows compare by position
    with a zero column counting as lowest.
    """
    R, V = dec.R, dec.V
    rp = R.row_pos

    def low_pos(ids):
        return max((rp[r] for r in ids), default=-1)

    first = cols[0]
    d_R, d_V = set(R.column_ids(first)), set(V.column_ids(first))
    d_low = low_pos(d_R)
    for k in cols[1:]:
        old_R, old_V = set(R.column_ids(k)), set(V.column_ids(k))
        old_low = low_pos(old_R)
        R.add_ids(k, d_R)
        V.add_ids(k, d_V)
        if old_low < d_low:
            d_low, d_R, d_V = old_low, old_R, old_V
    return d_R, d_V


def trace_right(dec: Decomposition, i: int, j: int) -> MoveTrace:
    R, V = dec.R, dec.V
    cancel = [i] + V.nonzero_in_row(i, i + 1, j + 1)
    conflicts = []
    ri = R.row_at[i]
    for r in range(i, j + 1):
        c = dec.pivot_col(r)
        if c is not None and ri in R.column_ids(c):
            conflicts.append(c)
    conflicts.sort()
    cost = (len(cancel) - 1) + max(len(conflicts) - 1, 0)
    return MoveTrace(i, j, cancel, conflicts, cost)


def move_right(dec: Decomposition, i: int, j: int) -> Decomposition:
    """Relocate the simplex at ``i`` to ``j > i``; positions in (i, j] shift down."""
    if j <= i:
        raise ValueError("move_right needs i < j")
    _check_move_faces(dec, i, j)
    R, V = dec.R, dec.V
    tr = trace_right(dec, i, j)
    touched = {R.col_at[c] for c in tr.cancel + tr.conflicts}
    d_R, d_V = _restore_right(dec, tr.cancel)
    if len(tr.conflicts) > 1:
        _restore_right(dec, tr.conflicts)
    sigma = R.col_at[i]
    dec.rotate(i, j)
    R.set_column_ids(j, d_R)
    V.set_column_ids(j, d_V)
    touched.add(sigma)
    # lows in [i, j] may be reordered by the row permutation
    for r in range(i, j + 1):
        c = dec.pivot_of[R.row_at[r]]
        if c >= 0:
            touched.add(c)
    dec.refresh_lows(touched)
    return dec


def trace_left(dec: Decomposition, i: int, j: int) -> MoveTrace:
    """Predict the V-column cancellations of a left move; conflicts need simulation."""
    V = dec.V
    col = set(V.column(i))
    cancel = []
    vr = {k: V.column(k) for k in range(j, i)}
    while True:
        below = [k for k in col if j <= k < i]
        if not below:
            break
        k = max(below)
        cancel.append(k)
        col ^= vr[k]
    V.counter.entry_queries += i - j
    return MoveTrace(i, j, cancel, [], len(cancel))


def move_left(dec: Decomposition, i: int, j: int, trace: MoveTrace | None = None) -> Decomposition:
    """Relocate the simplex at ``i`` to ``j < i``; positions in [j, i) shift up."""
    if j >= i:
        raise ValueError("move_left needs j < i")
    _check_move_faces(dec, i, j)
    R, V = dec.R, dec.V
    sigma = R.col_at[i]
    r_sigma = R.row_at[i]
    # cancel V[k, i] for k in [j, i), lowest first
    cancelled = []
    while True:
        vcol = V.column_ids(i)
        below = [V.row_pos[r] for r in vcol if j <= V.row_pos[r] < i]
        V.counter.entry_queries += 1
        if not below:
            break
        k = max(below)
        dec.add(i, k)
        cancelled.append(k)
    partner = dec.pivot_of[r_sigma]
    dec.rotate(i, j)

    dirty = {sigma}
    if partner >= 0:
        dirty.add(partner)
    for c in dirty:
        r = dec.low_of[c]
        if r >= 0 and dec.pivot_of[r] == c:
            dec.pivot_of[r] = -1
        dec.low_of[c] = -1
    cascade = 0
    while dirty:
        lows = {c: R.low_id(c) for c in dirty}
        R.counter.entry_queries += len(lows)
        for c in [c for c, r in lows.items() if r < 0]:
            dirty.discard(c)
        if not dirty:
            break
        c = max(dirty, key=lambda x: R.row_pos[lows[x]])
        r = lows[c]
        rivals = [x for x in dirty if x != c and lows[x] == r]
        other = rivals[0] if rivals else dec.pivot_of[r]
        if other < 0:
            dec.low_of[c] = r
            dec.pivot_of[r] = c
            dirty.discard(c)
            continue
        left, right = sorted((c, other), key=lambda x: R.col_pos[x])
        dec.add(R.col_pos[right], R.col_pos[left])
        cascade += 1
        if right == other:
            # c keeps its low; the partner changed and must be re-examined
            dec.pivot_of[r] = c
            dec.low_of[c] = r
            dirty.discard(c)
            dec.low_of[other] = -1
            dirty.add(other)
    if trace is not None:
        trace.cancel = cancelled
        trace.cost = len(cancelled) + cascade
    return dec


def move(dec: Decomposition, i: int, j: int, trace: MoveTrace | None = None) -> Decomposition:
    if i < j:
        return move_right(dec, i, j)
    if j < i:
        return move_left(dec, i, j, trace)
    return dec


def donor_trace(dec: Decomposition, i: int, j: int) -> int:
    """Column additions per matrix the move (i, j) would perform; ``dec`` is unchanged.

    This is the V count. R skips additions of zero columns, so its count
    can only be lower.
    """
    if i == j:
        return 0
    if i < j:
        return trace_right(dec, i, j).cost
    scratch = dec.copy()
    before = scratch.V.counter.col_ops
    move_left(scratch, i, j)
    return scratch.V.counter.col_ops - before
