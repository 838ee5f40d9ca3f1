"""Standard column reduction, decomposition validity and persistence pairs."""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .matrix import OpCounter, PermutableMatrix


class InvariantError(RuntimeError):
    """A decomposition failed R = DV or reducedness when it was required to hold."""


class Decomposition:
    """R = D V with D, R and V permuted in lockstep.

    Original column ids double as simplex ids: the simplex that sat at
    position k of the filtration ``D`` was built from. ``dims`` is indexed by
    simplex id. ``low_of[c]`` caches the original row id of the low entry of
    R column ``c`` (-1 when zero) and ``pivot_of[r]`` the column whose low is
    row ``r`` (-1 when none). Both are kept exact on return from every public
    operation in this package.
    """

    # every live instance, so callers can audit how many are resident
    registry: "weakref.WeakSet[Decomposition]" = weakref.WeakSet()

    def __init__(self, D: PermutableMatrix, R: PermutableMatrix, V: PermutableMatrix,
                 dims: Optional[Sequence[int]] = None):
        Decomposition.registry.add(self)
        self.D, self.R, self.V = D, R, V
        self.m = D.m
        self.dims = list(dims) if dims is not None else [0] * self.m
        self.low_of = [-1] * self.m
        self.pivot_of = [-1] * self.m
        self.refresh_lows()

    # -- bookkeeping -----------------------------------------------------

    @property
    def counter(self) -> OpCounter:
        return self.R.counter + self.V.counter

    def refresh_lows(self, cids=None) -> None:
        """Recompute cached lows for the given column ids (all when None)."""
        R = self.R
        if cids is None:
            self.low_of = [R.low_id(c) for c in range(self.m)]
            self.pivot_of = [-1] * self.m
            for c, r in enumerate(self.low_of):
                if r >= 0:
                    self.pivot_of[r] = c
            return
        cids = set(cids)
        for c in cids:
            r = self.low_of[c]
            if r >= 0 and self.pivot_of[r] == c:
                self.pivot_of[r] = -1
        for c in cids:
            r = R.low_id(c)
            self.low_of[c] = r
            if r >= 0:
                self.pivot_of[r] = c

    def low(self, j: int) -> Optional[int]:
        """Cached low position of R column at position ``j``."""
        self.R.counter.entry_queries += 1
        r = self.low_of[self.R.col_at[j]]
        return None if r < 0 else self.R.row_pos[r]

    def pivot_col(self, i: int) -> Optional[int]:
        """Position of the R column whose low sits in row position ``i``."""
        self.R.counter.entry_queries += 1
        c = self.pivot_of[self.R.row_at[i]]
        return None if c < 0 else self.R.col_pos[c]

    def add(self, target: int, source: int, r: bool = True, v: bool = True) -> None:
        """Column addition on R and/or V at positions, keeping caches stale."""
        if r:
            self.R.add_column(target, source)
        if v:
            self.V.add_column(target, source)

    def swap(self, i: int) -> None:
        """Exchange positions i and i+1 in all three matrices."""
        for M in (self.D, self.R, self.V):
            M.swap_rows(i, i + 1)
            M.swap_columns(i, i + 1)

    def permute(self, p: Sequence[int]) -> None:
        for M in (self.D, self.R, self.V):
            M.apply_permutation(p, "both")

    def rotate(self, i: int, j: int) -> None:
        """Move position i to j in all three matrices."""
        for M in (self.D, self.R, self.V):
            M.rotate(i, j)

    def simplex_at(self, k: int) -> int:
        return self.D.col_at[k]

    def order(self) -> list[int]:
        """Simplex ids by current position."""
        return list(self.D.col_at)

    def copy(self) -> "Decomposition":
        dec = Decomposition.__new__(Decomposition)
        Decomposition.registry.add(dec)
        dec.D, dec.R, dec.V = self.D.copy(), self.R.copy(), self.V.copy()
        dec.m, dec.dims = self.m, list(self.dims)
        dec.low_of, dec.pivot_of = list(self.low_of), list(self.pivot_of)
        return dec

    def reset_counters(self) -> None:
        for M in (self.D, self.R, self.V):
            M.counter = OpCounter()


def decomposition_from_filtration(K, rng=None) -> Decomposition:
    from .filtration import boundary_matrix
    dec = reduce(boundary_matrix(K), rng=rng)
    dec.dims = K.dims()
    return dec


def reduce(D: PermutableMatrix, rng: Optional[np.random.Generator] = None,
           dims: Optional[Sequence[int]] = None) -> Decomposition:
    """Left-to-right column reduction; D is copied, never mutated.

    With ``rng`` given, conflicting pairs are resolved in random order rather
    than column by column. Any such order reaches a reduced R.
    """
    m = D.m
    R = D.copy()
    R.counter = OpCounter()
    V = PermutableMatrix.identity(m)
    V.row_pos, V.row_at = list(D.row_pos), list(D.row_at)
    V.col_pos, V.col_at = list(D.col_pos), list(D.col_at)
    Dc = D.copy()
    Dc.counter = OpCounter()
    if rng is None:
        pivot: dict[int, int] = {}
        for j in range(m):
            lo = R.low(j)
            while lo is not None and lo in pivot:
                i = pivot[lo]
                R.add_column(j, i)
                V.add_column(j, i)
                lo = R.low(j)
            if lo is not None:
                pivot[lo] = j
    else:
        _reduce_random(R, V, rng)
    return Decomposition(Dc, R, V, dims)


def _reduce_random(R: PermutableMatrix, V: PermutableMatrix, rng) -> None:
    m = R.m
    while True:
        by_low: dict[int, list[int]] = {}
        for j in range(m):
            lo = R.low(j)
            if lo is not None:
                by_low.setdefault(lo, []).append(j)
        clashes = [cols for cols in by_low.values() if len(cols) > 1]
        if not clashes:
            return
        cols = clashes[rng.integers(len(clashes))]
        a, b = sorted(rng.choice(len(cols), size=2, replace=False))
        R.add_column(cols[b], cols[a])
        V.add_column(cols[b], cols[a])


# -- validity -------------------------------------------------------------

def _matmul_gf2(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return (A.astype(np.float64) @ B.astype(np.float64)).astype(np.int64) % 2


def is_reduced(R: PermutableMatrix) -> bool:
    seen = set()
    for j in range(R.m):
        lo = R.low(j)
        if lo is None:
            continue
        if lo in seen:
            return False
        seen.add(lo)
    return True


def validate(dec: Decomposition, check_cache: bool = True) -> bool:
    """True iff R = DV, V is upper triangular with unit diagonal and R is reduced.

    Read-only: instrumentation counters are left untouched.
    """
    saved = dec.R.counter.copy()
    try:
        return _validate(dec, check_cache)
    finally:
        c = dec.R.counter
        c.col_ops, c.entry_queries, c.perms_applied = saved.col_ops, saved.entry_queries, saved.perms_applied


def _validate(dec: Decomposition, check_cache: bool) -> bool:
    D, R, V = dec.D.to_dense(), dec.R.to_dense(), dec.V.to_dense()
    if not np.array_equal(_matmul_gf2(D, V), R):
        return False
    if np.tril(V, -1).any() or not np.diag(V).all():
        return False
    if not is_reduced(dec.R):
        return False
    if check_cache:
        for c in range(dec.m):
            if dec.low_of[c] != dec.R.low_id(c):
                return False
            r = dec.low_of[c]
            if r >= 0 and dec.pivot_of[r] != c:
                return False
    return True


def require_valid(dec: Decomposition, where: str = "") -> None:
    if not validate(dec):
        raise InvariantError(f"invalid decomposition{': ' + where if where else ''}")


# -- pairs ----------------------------------------------------------------

@dataclass(frozen=True, order=True)
class PersistencePair:
    dim: int
    birth: int
    death: Optional[int]            # None for an essential class
    birth_grade: float = math.nan
    death_grade: float = math.inf

    @property
    def essential(self) -> bool:
        return self.death is None

    def key(self):
        return (self.dim, self.birth, -1 if self.death is None else self.death)


class PersistenceDiagram(list):
    """List of PersistencePair sorted by (dim, birth, death)."""

    def index_pairs(self) -> list[tuple[int, int, Optional[int]]]:
        return [(p.dim, p.birth, p.death) for p in self]

    def dimension(self, p: int) -> "PersistenceDiagram":
        return PersistenceDiagram(x for x in self if x.dim == p)

    def same_pairs(self, other: "PersistenceDiagram") -> bool:
        return self.index_pairs() == other.index_pairs()


def extract_pairs(dec: Decomposition, grades: Optional[Sequence[float]] = None,
                  check: bool = False) -> PersistenceDiagram:
    """Pairs (birth, death) in 0-based positions; ``grades`` indexed by position."""
    if check and not validate(dec):
        raise InvariantError("extract_pairs needs a valid decomposition")
    m = dec.m
    R = dec.R
    paired = [False] * m
    out = []
    for j in range(m):
        c = R.col_at[j]
        r = dec.low_of[c]
        if r < 0:
            continue
        i = R.row_pos[r]
        paired[i] = paired[j] = True
        d = dec.dims[dec.simplex_at(i)]
        bg = grades[i] if grades is not None else math.nan
        dg = grades[j] if grades is not None else math.inf
        out.append(PersistencePair(d, i, j, bg, dg))
    for k in range(m):
        if not paired[k]:
            d = dec.dims[dec.simplex_at(k)]
            bg = grades[k] if grades is not None else math.nan
            out.append(PersistencePair(d, k, None, bg, math.inf))
    out.sort(key=PersistencePair.key)
    return PersistenceDiagram(out)


def betti_curve(dgm: Sequence[PersistencePair], p: int, m: int) -> list[int]:
    """Betti number of dimension p after inserting positions 0..k, for each k."""
    diff = np.zeros(m + 1, dtype=np.int64)
    for x in dgm:
        if x.dim != p:
            continue
        diff[x.birth] += 1
        if x.death is not None:
            diff[x.death] -= 1
    return np.cumsum(diff[:m]).tolist()


def diagram_csv(dgm: Sequence[PersistencePair], coords: str = "index", one_based: bool = True) -> str:
    """``dim,birth_index,death_index,birth_grade,death_grade`` rows.

    With ``coords="grade"`` pairs of zero persistence in grade are dropped.
    """
    off = 1 if one_based else 0
    lines = ["dim,birth_index,death_index,birth_grade,death_grade"]
    for x in dgm:
        if coords == "grade" and x.death is not None and x.birth_grade == x.death_grade:
            continue
        death = "inf" if x.death is None else str(x.death + off)
        lines.append(f"{x.dim},{x.birth + off},{death},{_fmt(x.birth_grade)},{_fmt(x.death_grade)}")
    return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf"
    if math.isnan(x):
        return "nan"
    return f"{x:.10g}"


def parse_diagram_csv(text: str, source: str = "<diagram>", one_based: bool = True) -> PersistenceDiagram:
    """Inverse of ``diagram_csv``; ``inf`` marks an essential class."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "dim,birth_index,death_index,birth_grade,death_grade":
        raise ValueError(f"{source}: missing diagram header")
    off = 1 if one_based else 0
    out = []
    for n, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != 5:
            raise ValueError(f"{source}:{n}: expected 5 fields")
        try:
            dim, birth = int(parts[0]), int(parts[1]) - off
            death = None if parts[2] == "inf" else int(parts[2]) - off
            bg, dg = float(parts[3]), float(parts[4])
        except ValueError as e:
            raise ValueError(f"{source}:{n}: {e}") from None
        out.append(PersistencePair(dim, birth, death, bg, dg))
    out.sort(key=PersistencePair.key)
    return PersistenceDiagram(out)
