"""Sparse GF(2) matrices with cheap simultaneous row/column permutation.

Columns hold unordered sets of *original* row ids. Two pairs of indirection
arrays translate between original ids and current positions, so permuting
rows or columns never touches column payloads.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Iterable, Optional, Sequence

import numpy as np


@dataclass
class OpCounter:
    """Instrumentation for the operations that dominate dynamic persistence."""

    col_ops: int = 0
    entry_queries: int = 0
    perms_applied: int = 0

    def __add__(self, other: "OpCounter") -> "OpCounter":
        return OpCounter(*(getattr(self, f.name) + getattr(other, f.name) for f in fields(self)))

    def __sub__(self, other: "OpCounter") -> "OpCounter":
        return OpCounter(*(getattr(self, f.name) - getattr(other, f.name) for f in fields(self)))

    def copy(self) -> "OpCounter":
        return OpCounter(self.col_ops, self.entry_queries, self.perms_applied)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _is_permutation(p: Sequence[int], m: int) -> bool:
    return len(p) == m and sorted(p) == list(range(m))


class PermutableMatrix:
    """Square m x m matrix over GF(2).

    ``row_pos[r]`` is the current position of original row ``r`` and
    ``row_at[k]`` the original row sitting at position ``k``; likewise for
    columns. All public methods speak in current positions.
    """

    def __init__(self, m: int, columns: Optional[Iterable[Iterable[int]]] = None,
                 counter: Optional[OpCounter] = None):
        self.m = m
        if columns is None:
            self.cols = [set() for _ in range(m)]
        else:
            self.cols = [set(c) for c in columns]
            if len(self.cols) != m:
                raise ValueError(f"expected {m} columns, got {len(self.cols)}")
            for c in self.cols:
                if c and (min(c) < 0 or max(c) >= m):
                    raise ValueError("row index out of range")
        self.row_pos = list(range(m))
        self.row_at = list(range(m))
        self.col_pos = list(range(m))
        self.col_at = list(range(m))
        self.counter = counter if counter is not None else OpCounter()

    # -- construction ----------------------------------------------------

    @classmethod
    def identity(cls, m: int) -> "PermutableMatrix":
        return cls(m, [{k} for k in range(m)])

    @classmethod
    def from_dense(cls, A) -> "PermutableMatrix":
        A = np.asarray(A) % 2
        m = A.shape[0]
        if A.shape != (m, m):
            raise ValueError("matrix must be square")
        return cls(m, [set(np.flatnonzero(A[:, j]).tolist()) for j in range(m)])

    def copy(self) -> "PermutableMatrix":
        M = PermutableMatrix(self.m)
        M.cols = [set(c) for c in self.cols]
        M.row_pos, M.row_at = list(self.row_pos), list(self.row_at)
        M.col_pos, M.col_at = list(self.col_pos), list(self.col_at)
        M.counter = self.counter.copy()
        return M

    # -- queries ---------------------------------------------------------

    def column(self, j: int) -> set[int]:
        """Row positions of the nonzeros in column ``j``."""
        rp = self.row_pos
        return {rp[r] for r in self.cols[self.col_at[j]]}

    def column_ids(self, j: int) -> set[int]:
        """The stored set of original row ids in column ``j`` (not a copy)."""
        return self.cols[self.col_at[j]]

    def is_zero(self, j: int) -> bool:
        self.counter.entry_queries += 1
        return not self.cols[self.col_at[j]]

    def low(self, j: int) -> Optional[int]:
        """Position of the lowest nonzero in column ``j``; None if empty."""
        self.counter.entry_queries += 1
        col = self.cols[self.col_at[j]]
        if not col:
            return None
        rp = self.row_pos
        return max(rp[r] for r in col)

    def low_id(self, cid: int) -> int:
        """Original row id of the low entry of original column ``cid``; -1 if empty."""
        col = self.cols[cid]
        if not col:
            return -1
        rp = self.row_pos
        return max(col, key=rp.__getitem__)

    def entry(self, i: int, j: int) -> int:
        self.counter.entry_queries += 1
        return int(self.row_at[i] in self.cols[self.col_at[j]])

    def nonzero_in_row(self, i: int, lo: int = 0, hi: Optional[int] = None) -> list[int]:
        """Columns ``k`` in ``[lo, hi)`` with a nonzero at row ``i``."""
        hi = self.m if hi is None else hi
        r = self.row_at[i]
        cols, at = self.cols, self.col_at
        self.counter.entry_queries += max(0, hi - lo)
        return [k for k in range(lo, hi) if r in cols[at[k]]]

    def nnz(self) -> int:
        return sum(len(c) for c in self.cols)

    # -- mutation --------------------------------------------------------

    def add_column(self, target: int, source: int) -> None:
        """col(target) <- col(target) + col(source) over GF(2).

        Adding a zero column is a no-op and is not counted.
        """
        if target == source:
            raise ValueError("cannot add a column to itself")
        src = self.cols[self.col_at[source]]
        if src:
            self.cols[self.col_at[target]] ^= src
            self.counter.col_ops += 1

    def add_ids(self, target: int, ids: Iterable[int]) -> None:
        """Add a detached column, given as original row ids, into ``target``."""
        ids = set(ids)
        if ids:
            self.cols[self.col_at[target]] ^= ids
            self.counter.col_ops += 1

    def set_column_ids(self, j: int, ids: Iterable[int]) -> None:
        self.cols[self.col_at[j]] = set(ids)

    def swap_rows(self, i: int, k: int) -> None:
        a, b = self.row_at[i], self.row_at[k]
        self.row_at[i], self.row_at[k] = b, a
        self.row_pos[a], self.row_pos[b] = k, i
        self.counter.perms_applied += 1

    def swap_columns(self, i: int, k: int) -> None:
        a, b = self.col_at[i], self.col_at[k]
        self.col_at[i], self.col_at[k] = b, a
        self.col_pos[a], self.col_pos[b] = k, i
        self.counter.perms_applied += 1

    def apply_permutation(self, p: Sequence[int], axis: str = "both") -> None:
        """Relocate whatever sits at position ``k`` to position ``p[k]``.

        ``axis`` is ``"rows"``, ``"cols"`` or ``"both"``; ``"both"`` is the
        conjugation P A P^T and counts as one application.
        """
        if not _is_permutation(p, self.m):
            raise ValueError("not a permutation of range(m)")
        if axis not in ("rows", "cols", "both"):
            raise ValueError(f"unknown axis {axis!r}")
        if axis in ("rows", "both"):
            new_at = [0] * self.m
            for k, r in enumerate(self.row_at):
                new_at[p[k]] = r
            self.row_at = new_at
            for k, r in enumerate(new_at):
                self.row_pos[r] = k
        if axis in ("cols", "both"):
            new_at = [0] * self.m
            for k, c in enumerate(self.col_at):
                new_at[p[k]] = c
            self.col_at = new_at
            for k, c in enumerate(new_at):
                self.col_pos[c] = k
        self.counter.perms_applied += 1

    def rotate(self, i: int, j: int) -> None:
        """Move position ``i`` to ``j`` on rows and columns, shifting the span between.

        Same effect as ``apply_permutation(move_permutation(m, i, j))`` but
        touches only positions between ``i`` and ``j``.
        """
        if not (0 <= i < self.m and 0 <= j < self.m):
            raise IndexError(f"move ({i}, {j}) out of range for m={self.m}")
        lo, hi = min(i, j), max(i, j)
        for at, pos in ((self.row_at, self.row_pos), (self.col_at, self.col_pos)):
            seg = at[lo:hi + 1]
            seg = seg[1:] + seg[:1] if i < j else seg[-1:] + seg[:-1]
            at[lo:hi + 1] = seg
            for k, x in enumerate(seg, start=lo):
                pos[x] = k
        self.counter.perms_applied += 1

    # -- views -----------------------------------------------------------

    def to_dense(self) -> np.ndarray:
        A = np.zeros((self.m, self.m), dtype=np.uint8)
        for j in range(self.m):
            for i in self.column(j):
                A[i, j] = 1
        return A

    def dump(self) -> str:
        """Dense 0/1 grid in current permutation order, row-major."""
        A = self.to_dense()
        return "\n".join("".join(str(int(x)) for x in row) for row in A) + ("\n" if self.m else "")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PermutableMatrix):
            return NotImplemented
        return self.m == other.m and all(self.column(j) == other.column(j) for j in range(self.m))

    def __repr__(self) -> str:
        return f"PermutableMatrix(m={self.m}, nnz={self.nnz()})"


def move_permutation(m: int, i: int, j: int) -> list[int]:
    """Position map of the move sending position ``i`` to ``j``.

    Entries strictly between shift by one toward ``i``.
    """
    p = list(range(m))
    if i < j:
        for k in range(i + 1, j + 1):
            p[k] = k - 1
    else:
        for k in range(j, i):
            p[k] = k + 1
    p[i] = j
    return p


def inverse_permutation(p: Sequence[int]) -> list[int]:
    inv = [0] * len(p)
    for k, v in enumerate(p):
        inv[v] = k
    return inv
