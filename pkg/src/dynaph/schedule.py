"""Permutation distances, LIS/LCS and minimal move schedules.

Permutations are handled as *words*: the sequence of symbols listed by
position. A move (i, j) takes the symbol at position i out and reinserts it
at position j, shifting everything in between by one toward i.
"""

from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from sortedcontainers import SortedList

# reach(position_of, symbol) -> (lo, hi): the symbol may be placed anywhere in [lo, hi];
# position_of maps any symbol to its current position
Reach = Callable[[Callable, object], tuple[int, int]]


def _positions(word: Sequence) -> dict:
    return {s: k for k, s in enumerate(word)}


def _check_pair(p: Sequence, q: Sequence) -> dict:
    if len(p) != len(q):
        raise ValueError(f"length mismatch: {len(p)} vs {len(q)}")
    pos_q = _positions(q)
    if len(pos_q) != len(q) or any(s not in pos_q for s in p):
        raise ValueError("words are not permutations of the same symbols")
    return pos_q


def relative(p: Sequence, q: Sequence) -> list[int]:
    """q-ranks of the symbols of p, in p's order (the permutation q^-1 o p)."""
    pos_q = _check_pair(p, q)
    return [pos_q[s] for s in p]


def apply_move(word: list, i: int, j: int) -> list:
    """Move the symbol at i to j in place and return the word."""
    word.insert(j, word.pop(i))
    return word


def move_symbol_order(m: int, i: int, j: int) -> list[int]:
    """Word of the move permutation: old positions listed by new position."""
    return apply_move(list(range(m)), i, j)


# -- distances ------------------------------------------------------------

def count_inversions(seq: Sequence[int]) -> int:
    """Inversions of a sequence of distinct integers via a Fenwick tree."""
    vals = sorted(seq)
    rank = {v: k + 1 for k, v in enumerate(vals)}
    n = len(seq)
    tree = [0] * (n + 1)
    inv = 0
    for seen, v in enumerate(seq):
        r = rank[v]
        k, below = r, 0
        while k > 0:
            below += tree[k]
            k -= k & -k
        inv += seen - below
        k = r
        while k <= n:
            tree[k] += 1
            k += k & -k
    return inv


def kendall_distance(p: Sequence, q: Sequence) -> int:
    """Number of symbol pairs ordered differently by p and q."""
    return count_inversions(relative(p, q))


def spearman_distance(p: Sequence, q: Sequence) -> int:
    """Sum over symbols of |position in p - position in q|."""
    r = np.asarray(relative(p, q))
    return int(np.abs(r - np.arange(len(r))).sum())


# -- LIS / LCS ------------------------------------------------------------

def lis_indices(seq: Sequence) -> list[int]:
    """Indices of one longest strictly increasing subsequence (patience sorting).

    Among maximal subsequences, returns the one that reaches full length
    earliest in the sequence.
    """
    tails: list = []         # smallest tail value of an increasing run of each length
    tail_idx: list[int] = []
    first_end: list[int] = []
    prev = [-1] * len(seq)
    for k, v in enumerate(seq):
        pile = bisect.bisect_left(tails, v)
        if pile == len(tails):
            tails.append(v)
            tail_idx.append(k)
            first_end.append(k)
        else:
            tails[pile] = v
            tail_idx[pile] = k
        prev[k] = tail_idx[pile - 1] if pile > 0 else -1
    out = []
    k = first_end[-1] if first_end else -1
    while k >= 0:
        out.append(k)
        k = prev[k]
    return out[::-1]


def lis(seq: Sequence) -> list:
    return [seq[k] for k in lis_indices(seq)]


def lcs_via_lis(p: Sequence, q: Sequence) -> list:
    """A longest common subsequence of two words over the same symbols."""
    return [p[k] for k in lis_indices(relative(p, q))]


def lis_constant_estimate(m: int, c: float = -1.77108) -> float:
    """Expected LIS length of a uniform permutation, 2 sqrt(m) + c m^(1/6)."""
    return 2 * np.sqrt(m) + c * m ** (1 / 6)


# -- schedules ------------------------------------------------------------

@dataclass
class MoveSchedule:
    """Moves (i, j) turning ``source`` into ``target`` when applied in order."""

    moves: list[tuple[int, int]]
    source: list
    target: list
    symbols: list = field(default_factory=list)   # symbol relocated by each move

    def __len__(self) -> int:
        return len(self.moves)

    def __iter__(self):
        return iter(self.moves)

    def apply(self, word: Optional[Sequence] = None) -> list:
        w = list(self.source if word is None else word)
        for i, j in self.moves:
            apply_move(w, i, j)
        return w

    def words(self) -> list[list]:
        """Intermediate words, source first and target last."""
        w = list(self.source)
        out = [list(w)]
        for i, j in self.moves:
            out.append(list(apply_move(w, i, j)))
        return out

    def text(self, one_based: bool = True) -> str:
        off = 1 if one_based else 0
        return f"moves m={len(self.source)} count={len(self.moves)}\n" + "".join(
            f"{i + off} {j + off}\n" for i, j in self.moves)


def parse_schedule_text(text: str, one_based: bool = True) -> tuple[int, list[tuple[int, int]]]:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("moves"):
        raise ValueError("schedule must start with a 'moves m=<m> count=<d>' header")
    head = dict(tok.split("=") for tok in lines[0].split()[1:])
    m, count = int(head["m"]), int(head["count"])
    off = 1 if one_based else 0
    moves = []
    for n, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"line {n}: expected 'i j'")
        i, j = int(parts[0]) - off, int(parts[1]) - off
        if not (0 <= i < m and 0 <= j < m):
            raise ValueError(f"line {n}: position out of range")
        moves.append((i, j))
    if len(moves) != count:
        raise ValueError(f"header says {count} moves, found {len(moves)}")
    return m, moves


class _LcsState:
    """Current word, q-ranks and the growing common subsequence."""

    def __init__(self, p: Sequence, q: Sequence):
        self.q = list(q)
        self.rank = _check_pair(p, q)
        self.m = len(q)
        self.word = list(p)
        self.ranks = [self.rank[s] for s in p]          # q-rank by current position
        self.where = {r: k for k, r in enumerate(self.ranks)}
        keep = lis(self.ranks)
        self.kept = SortedList([-1, self.m] + keep)     # sentinels
        self.pending = SortedList(set(range(self.m)) - set(keep))

    def position_of(self, symbol) -> int:
        return self.where[self.rank[symbol]]

    def window(self, r: int) -> tuple[int, int, int]:
        """(position of r, position of its kept predecessor, of its successor)."""
        k = self.kept.bisect_left(r)
        pred, succ = self.kept[k - 1], self.kept[k]
        ip = -1 if pred < 0 else self.where[pred]
        in_ = self.m if succ >= self.m else self.where[succ]
        return self.where[r], ip, in_

    def targets(self, r: int) -> tuple[int, int]:
        """Range of admissible targets j for symbol of rank r."""
        i, ip, in_ = self.window(r)
        if i < ip:
            return ip, in_ - 1
        if in_ < i:
            return ip + 1, in_
        raise AssertionError("pending symbol already fits the common subsequence")

    def default_target(self, r: int) -> int:
        i, ip, in_ = self.window(r)
        return ip if i < ip else in_

    def apply(self, r: int, j: int) -> tuple[int, int]:
        i = self.where[r]
        apply_move(self.word, i, j)
        apply_move(self.ranks, i, j)
        lo, hi = min(i, j), max(i, j)
        for k in range(lo, hi + 1):
            self.where[self.ranks[k]] = k
        self.pending.remove(r)
        self.kept.add(r)
        return i, j


def _clip(state: _LcsState, r: int, reach: Optional[Reach]) -> Optional[tuple[int, int]]:
    lo, hi = state.targets(r)
    if reach is not None:
        a, b = reach(state.position_of, state.word[state.where[r]])
        lo, hi = max(lo, a), min(hi, b)
    return (lo, hi) if lo <= hi else None


def lcs_sort(p: Sequence, q: Sequence, reach: Optional[Reach] = None) -> MoveSchedule:
    """A schedule of exactly m - |LCS(p, q)| moves from p to q.

    Pending symbols are taken in increasing q-rank. Each is placed right
    after its kept predecessor when moving right, or right before its kept
    successor when moving left. With ``reach`` given, a symbol whose move
    would break face order is skipped for now. The highest-ranked right-mover
    and the lowest-ranked left-mover are always admissible, so progress is
    guaranteed whenever p and q are both face-respecting.
    """
    st = _LcsState(p, q)
    moves, syms = [], []
    while st.pending:
        for r in st.pending:
            lim = _clip(st, r, reach)
            if lim is None:
                continue
            j = min(max(st.default_target(r), lim[0]), lim[1])
            break
        else:
            raise ValueError("no admissible move: source or target breaks face order")
        syms.append(st.word[st.where[r]])
        moves.append(st.apply(r, j))
    assert st.word == st.q
    return MoveSchedule(moves, list(p), list(q), syms)


def enumerate_lcs_schedules(p: Sequence, q: Sequence) -> list[MoveSchedule]:
    """Every schedule obtainable by choosing the order of pending symbols.

    Targets follow the lcs_sort placement rule. Exponential in d; small inputs only.
    """
    st0 = _LcsState(p, q)
    out = []
    for order in itertools.permutations(list(st0.pending)):
        st = _LcsState(p, q)
        moves, syms = [], []
        for r in order:
            syms.append(st.word[st.where[r]])
            moves.append(st.apply(r, st.default_target(r)))
        out.append(MoveSchedule(moves, list(p), list(q), syms))
    return out


class DisplacementLedger:
    """Signed displacement (current minus target position) of the symbol at each position."""

    def __init__(self, p: Sequence, q: Sequence):
        r = np.asarray(relative(p, q), dtype=np.int64)
        self.disp = np.arange(len(r), dtype=np.int64) - r
        self.total = int(np.abs(self.disp).sum())

    def delta(self, i: int, j: int) -> int:
        """Change in the total if the move (i, j) were applied.

        The moved symbol shifts by j - i, symbols strictly between (plus j)
        shift by one toward i, everything else is unchanged.
        """
        A = self.disp
        a = A[i]
        d = abs(a + (j - i)) - abs(a)
        if i < j:
            seg = A[i + 1:j + 1]
            d += int((np.abs(seg - 1) - np.abs(seg)).sum())
        elif j < i:
            seg = A[j:i]
            d += int((np.abs(seg + 1) - np.abs(seg)).sum())
        return int(d)

    def deltas(self, i: int, lo: int, hi: int) -> np.ndarray:
        """delta(i, j) for every j in [lo, hi]; i must lie outside the range."""
        A = self.disp
        a = A[i]
        js = np.arange(lo, hi + 1)
        own = np.abs(a + (js - i)) - abs(a)
        if i < lo:
            step = np.abs(A[i + 1:hi + 1] - 1) - np.abs(A[i + 1:hi + 1])
            cum = np.cumsum(step)
            return own + cum[js - i - 1]
        step = np.abs(A[lo:i] + 1) - np.abs(A[lo:i])
        cum = np.cumsum(step[::-1])[::-1]        # cum[k - lo] = sum over [k, i)
        return own + cum[js - lo]

    def apply(self, i: int, j: int) -> None:
        d = self.delta(i, j)
        A = self.disp
        a = A[i] + (j - i)
        if i < j:
            A[i:j] = A[i + 1:j + 1] - 1
        else:
            A[j + 1:i + 1] = A[j:i] + 1
        A[j] = a
        self.total += d


def greedy_schedule(p: Sequence, q: Sequence, reach: Optional[Reach] = None) -> MoveSchedule:
    """Minimal-size schedule picking, at each step, the admissible move with the
    smallest resulting Spearman distance to q.

    Ties go to the smaller q-rank, then to the target nearest the default slot.
    """
    st = _LcsState(p, q)
    ledger = DisplacementLedger(p, q)
    moves, syms = [], []
    while st.pending:
        best = None
        for r in st.pending:
            lim = _clip(st, r, reach)
            if lim is None:
                continue
            i = st.where[r]
            vals = ledger.deltas(i, lim[0], lim[1])
            k = int(np.argmin(vals))
            cands = np.flatnonzero(vals == vals[k]) + lim[0]
            dflt = st.default_target(r)
            j = int(cands[np.argmin(np.abs(cands - dflt))])
            key = (int(vals[k]), r)
            if best is None or key < best[0]:
                best = (key, r, j)
        if best is None:
            raise ValueError("no admissible move: source or target breaks face order")
        _, r, j = best
        syms.append(st.word[st.where[r]])
        i = st.where[r]
        ledger.apply(i, j)
        moves.append(st.apply(r, j))
    return MoveSchedule(moves, list(p), list(q), syms)


def schedule_displacement_cost(sched: MoveSchedule) -> int:
    """Sum over steps of the Spearman distance between consecutive words."""
    ws = sched.words()
    return sum(spearman_distance(a, b) for a, b in zip(ws, ws[1:]))


def random_lcs_schedule(p: Sequence, q: Sequence, rng: np.random.Generator) -> MoveSchedule:
    """Uniformly random pending symbol and target within its window."""
    st = _LcsState(p, q)
    moves, syms = [], []
    while st.pending:
        r = st.pending[int(rng.integers(len(st.pending)))]
        lo, hi = st.targets(r)
        j = int(rng.integers(lo, hi + 1))
        syms.append(st.word[st.where[r]])
        moves.append(st.apply(r, j))
    return MoveSchedule(moves, list(p), list(q), syms)


def coarsen_transpositions(swaps: Sequence[int]) -> list[tuple[int, int]]:
    """Collapse maximal runs i, i+1, ..., j-1 of adjacent swaps into the move (i, j)."""
    out: list[tuple[int, int]] = []
    k, n = 0, len(swaps)
    while k < n:
        start = swaps[k]
        end = start
        k += 1
        while k < n and swaps[k] == end + 1:
            end += 1
            k += 1
        out.append((start, end + 1))
    return out
