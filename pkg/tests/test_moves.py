import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dynaph.filtration import Filtration
from dynaph.moves import MoveTrace, donor_trace, move, move_left, move_right, trace_left, trace_right
from dynaph.reduce import decomposition_from_filtration, extract_pairs, validate
from dynaph.vineyard import FaceOrderError, transpose
from oracles import fresh_pairs, random_filtration

TRIANGLE = [(0,), (1,), (2,), (0, 2), (1, 2), (0, 1)]


def admissible(dec, i):
    lo = max(dec.D.column(i), default=-1) + 1
    above = dec.D.nonzero_in_row(i, i + 1, dec.m)
    return lo, (above[0] if above else dec.m) - 1


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_random_moves_match_fresh_reduction(seed):
    rng = np.random.default_rng(seed)
    K = random_filtration(rng, m_max=40)
    dec = decomposition_from_filtration(K)
    for _ in range(20):
        i = int(rng.integers(dec.m))
        lo, hi = admissible(dec, i)
        j = int(rng.integers(lo, hi + 1))
        predicted = donor_trace(dec, i, j)
        r0, v0 = dec.R.counter.col_ops, dec.V.counter.col_ops
        move(dec, i, j)
        dr, dv = dec.R.counter.col_ops - r0, dec.V.counter.col_ops - v0
        assert dv == predicted
        assert dr <= dv <= 2 * abs(i - j)
        assert validate(dec)
        assert extract_pairs(dec).index_pairs() == fresh_pairs(K.reordered(dec.order()))


def test_worked_move_example():
    dec = decomposition_from_filtration(Filtration.from_order(TRIANGLE))
    r0, v0 = dec.R.counter.col_ops, dec.V.counter.col_ops
    move_right(dec, 3, 5)
    assert (dec.R.counter.col_ops - r0, dec.V.counter.col_ops - v0) == (2, 2)
    # order u v w b c a: b = {v, w}, c = {u, v}, a reduced to zero
    assert dec.R.column(3) == {1, 2} and dec.R.column(4) == {0, 1} and dec.R.is_zero(5)
    assert dec.V.column(5) == {3, 4, 5}


def test_same_permutation_by_transpositions_costs_more():
    base = decomposition_from_filtration(Filtration.from_order(TRIANGLE))
    a, b = base.copy(), base.copy()
    move(a, 3, 5)
    transpose(b, 3)
    transpose(b, 4)
    assert a.order() == b.order()
    assert a.V.counter.col_ops - base.V.counter.col_ops == 2
    assert b.V.counter.col_ops - base.V.counter.col_ops == 4


def test_donor_trace_leaves_decomposition_alone():
    dec = decomposition_from_filtration(Filtration.from_order(TRIANGLE))
    def snap():
        return (dec.order(), dec.R.to_dense().tolist(), dec.V.to_dense().tolist(),
                list(dec.low_of), dec.counter.col_ops)
    before = snap()
    donor_trace(dec, 5, 3)
    donor_trace(dec, 3, 5)
    assert snap() == before


def test_face_order_is_enforced():
    dec = decomposition_from_filtration(Filtration.from_order(TRIANGLE))
    with pytest.raises(FaceOrderError):
        move(dec, 0, 4)          # u cannot pass its coface a
    with pytest.raises(FaceOrderError):
        move(dec, 3, 1)          # a cannot precede its face w
    with pytest.raises(ValueError):
        move_right(dec, 3, 3)
    with pytest.raises(ValueError):
        move_left(dec, 3, 4)
    assert move(dec, 2, 2) is dec


def test_traces():
    dec = decomposition_from_filtration(Filtration.from_order(TRIANGLE))
    tr = trace_right(dec, 3, 5)
    assert isinstance(tr, MoveTrace) and tr.cost == 2
    t = MoveTrace(5, 3)
    cost = donor_trace(dec, 5, 3)
    move_left(dec, 5, 3, t)
    assert t.cost == cost
    assert trace_left(dec, 5, 3).cost >= 0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_move_and_its_transposition_run_share_a_budget(seed):
    # both a move (i, j) and the |i - j| swaps it replaces stay within 2|i - j|
    rng = np.random.default_rng(seed)
    K = random_filtration(rng, m_max=35)
    dec = decomposition_from_filtration(K)
    for _ in range(10):
        i = int(rng.integers(dec.m))
        lo, hi = admissible(dec, i)
        j = int(rng.integers(lo, hi + 1))
        if i == j:
            continue
        runs = dec.copy()
        v0 = runs.V.counter.col_ops
        steps = range(i, j) if i < j else range(i - 1, j - 1, -1)
        for k in steps:
            transpose(runs, k)
        vine = runs.V.counter.col_ops - v0
        m0 = dec.V.counter.col_ops
        move(dec, i, j)
        assert dec.V.counter.col_ops - m0 <= 2 * abs(i - j)
        assert runs.order() == dec.order()
        assert vine <= 2 * abs(i - j)
