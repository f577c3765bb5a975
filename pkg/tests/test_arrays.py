from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from metriclike.arrays import RationalArray, ValueArray
from metriclike.points import PointValue

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=60)
pairs = st.lists(st.tuples(fractions, fractions), min_size=1, max_size=30)


def _arr(values):
    return RationalArray(
        np.array([v.numerator for v in values], dtype=object),
        np.array([v.denominator for v in values], dtype=object),
    )


@given(pairs)
def test_elementwise_ops_match_fractions(ps):
    a = [p[0] for p in ps]
    b = [p[1] for p in ps]
    A, B = _arr(a), _arr(b)
    assert (A + B).to_fractions() == [x + y for x, y in zip(a, b)]
    assert (A - B).to_fractions() == [x - y for x, y in zip(a, b)]
    assert (A * B).to_fractions() == [x * y for x, y in zip(a, b)]
    assert list(A.eq(B)) == [x == y for x, y in zip(a, b)]
    assert list(A.sign()) == [(x > 0) - (x < 0) for x in a]


@given(st.lists(fractions, min_size=1, max_size=30), fractions)
def test_comparisons_against_scalar(values, q):
    A = _arr(values)
    assert list(A.cmp_value(q)) == [(v > q) - (v < q) for v in values]
    if q > 0:
        assert list(A.abs_ge(q)) == [abs(v) >= q for v in values]
    assert list(A.eq_value(q)) == [v == q for v in values]


def test_division_by_zero_reports_positions():
    A = RationalArray.from_ints([1, 2, 3])
    B = RationalArray.from_ints([1, 0, 0])
    with pytest.raises(ZeroDivisionError) as info:
        A / B
    assert list(info.value.positions) == [1, 2]


def test_reduced_and_helpers():
    A = RationalArray(np.array([2, 6, -4], dtype=object), np.array([4, 3, 8], dtype=object)).reduced()
    assert list(A.num) == [1, 2, -1]
    assert list(A.den) == [2, 1, 2]
    assert A.take([2, 0]).to_fractions() == [Fraction(-1, 2), Fraction(1, 2)]
    B = RationalArray.zeros(3)
    B.put([1], RationalArray.constant(Fraction(5, 7), 1))
    assert B.to_fractions() == [0, Fraction(5, 7), 0]
    assert B.where(np.array([True, False, True]), A).to_fractions() == [0, Fraction(2), 0]


def test_value_array_roundtrip_and_tags():
    pts = [PointValue(1), PointValue.tag("sqrt2"), PointValue.tag("pi", 2) + Fraction(1, 3)]
    V = ValueArray.from_points(pts)
    assert V.points() == pts
    assert list(V.is_irrational()) == [False, True, True]
    assert V.approx().to_fractions() == [p.approx for p in pts]
    doubled = V + V
    assert doubled.points() == [p + p for p in pts]
    assert list(V.eq(ValueArray.full(PointValue.tag("sqrt2"), 3))) == [False, True, False]
    with pytest.raises(ValueError):
        V * V
    assert (V / ValueArray.full(PointValue(2), 3)).points() == [p / 2 for p in pts]


@given(st.lists(st.tuples(fractions, fractions), min_size=1, max_size=20))
def test_value_array_matches_point_arithmetic(ps):
    xs = [q + PointValue.tag("sqrt3", c) for q, c in ps]
    ys = [PointValue(c) for _, c in ps]
    X, Y = ValueArray.from_points(xs), ValueArray.from_points(ys)
    assert (X + Y).points() == [x + y for x, y in zip(xs, ys)]
    assert (X - Y).points() == [x - y for x, y in zip(xs, ys)]
    assert (X * Y).points() == [x * y for x, y in zip(xs, ys)]
