import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dynaph.schedule import (DisplacementLedger, MoveSchedule, apply_move, coarsen_transpositions,
                             count_inversions, enumerate_lcs_schedules, greedy_schedule,
                             kendall_distance, lcs_sort, lcs_via_lis, lis, lis_constant_estimate,
                             lis_indices, parse_schedule_text, random_lcs_schedule, relative,
                             schedule_displacement_cost, spearman_distance)
from oracles import lcs_dp

perm_pairs = st.integers(1, 12).flatmap(
    lambda m: st.tuples(st.permutations(list(range(m))), st.permutations(list(range(m)))))


def brute_kendall(p, q):
    r = relative(p, q)
    return sum(r[a] > r[b] for a, b in itertools.combinations(range(len(r)), 2))


@settings(max_examples=200, deadline=None)
@given(perm_pairs)
def test_distances_against_brute_force(pq):
    p, q = pq
    assert kendall_distance(p, q) == brute_kendall(p, q)
    f = sum(abs(p.index(s) - q.index(s)) for s in p)
    assert spearman_distance(p, q) == f
    assert kendall_distance(p, q) <= f <= 2 * kendall_distance(p, q)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 50), max_size=14, unique=True))
def test_lis_is_longest_and_increasing(seq):
    idx = lis_indices(seq)
    vals = [seq[k] for k in idx]
    assert idx == sorted(idx) and vals == sorted(vals)
    assert len(vals) == lcs_dp(seq, sorted(seq))


@settings(max_examples=300, deadline=None)
@given(perm_pairs)
def test_lcs_sort_is_minimal(pq):
    p, q = pq
    s = lcs_sort(p, q)
    assert s.apply() == list(q)
    assert len(s) == len(p) - lcs_dp(p, q)
    assert len(lcs_via_lis(p, q)) == lcs_dp(p, q)


@settings(max_examples=200, deadline=None)
@given(perm_pairs)
def test_greedy_is_minimal_and_ledger_exact(pq):
    p, q = pq
    s = greedy_schedule(p, q)
    assert s.apply() == list(q) and len(s) == len(p) - lcs_dp(p, q)
    led = DisplacementLedger(p, q)
    w = list(p)
    for i, j in s.moves:
        before = spearman_distance(w, q)
        d = led.delta(i, j)
        apply_move(w, i, j)
        led.apply(i, j)
        assert spearman_distance(w, q) - before == d
        assert led.total == spearman_distance(w, q)


@settings(max_examples=100, deadline=None)
@given(perm_pairs, st.data())
def test_vectorized_deltas(pq, data):
    p, q = pq
    m = len(p)
    if m < 2:
        return
    led = DisplacementLedger(p, q)
    i = data.draw(st.integers(0, m - 1))
    lo = data.draw(st.integers(0, m - 1))
    hi = data.draw(st.integers(lo, m - 1))
    if lo <= i <= hi:
        return
    assert led.deltas(i, lo, hi).tolist() == [led.delta(i, j) for j in range(lo, hi + 1)]


def test_nine_symbol_example():
    p = list(range(1, 10))
    q = [9, 4, 2, 7, 1, 8, 6, 3, 5]
    assert kendall_distance(p, q) == 21
    assert spearman_distance(p, q) == 30
    assert lis([9, 4, 2, 7, 1, 8, 6, 3, 5]) == [2, 7, 8]
    assert len(lcs_sort(p, q)) == 6


def test_enumeration_counts_orders():
    p, q = list("abcduvwxyz"), list("abcdxyzuvw")
    scheds = enumerate_lcs_schedules(p, q)
    assert len(scheds) == 6
    assert all(s.apply() == q for s in scheds)
    assert lcs_sort(p, q).moves == [(7, 4), (8, 5), (9, 6)]
    assert [s.symbols for s in scheds][0] == ["x", "y", "z"]


def test_reach_limits_targets():
    p, q = [0, 1, 2, 3], [3, 2, 1, 0]
    wide = lcs_sort(p, q, reach=lambda pos, s: (0, 3))
    assert wide.apply() == q
    with pytest.raises(ValueError):
        greedy_schedule(p, q, reach=lambda pos, s: (pos(s), pos(s)))


def test_random_schedules_are_minimal():
    rng = np.random.default_rng(0)
    for _ in range(200):
        m = int(rng.integers(1, 10))
        p, q = rng.permutation(m).tolist(), rng.permutation(m).tolist()
        s = random_lcs_schedule(p, q, rng)
        assert s.apply() == q and len(s) == m - lcs_dp(p, q)
        assert schedule_displacement_cost(s) >= 0


def test_text_round_trip():
    s = lcs_sort(list("abcduvwxyz"), list("abcdxyzuvw"))
    m, moves = parse_schedule_text(s.text())
    assert m == 10 and moves == s.moves
    assert s.text().splitlines()[0] == "moves m=10 count=3"
    with pytest.raises(ValueError):
        parse_schedule_text("moves m=2 count=2\n1 2\n")
    with pytest.raises(ValueError):
        parse_schedule_text("1 2\n")


def test_coarsening():
    assert coarsen_transpositions([]) == []
    assert coarsen_transpositions([2, 3, 4, 0, 5, 6]) == [(2, 5), (0, 1), (5, 7)]


def test_inversions_and_estimate():
    assert count_inversions([3, 2, 1, 0]) == 6
    assert count_inversions([]) == 0
    assert lis_constant_estimate(1000) == pytest.approx(57.645, abs=1e-2)
    with pytest.raises(ValueError):
        kendall_distance([0, 1], [0, 2])


def test_schedule_words():
    s = MoveSchedule([(0, 2)], [0, 1, 2], [1, 2, 0])
    assert s.words() == [[0, 1, 2], [1, 2, 0]]
