import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from metriclike.density import (
    All,
    Arith,
    BandMin,
    Complement,
    Finite,
    Intersection,
    Predicate,
    Predicate2,
    Product,
    Squares,
    Union,
    Union2,
    default_schedule,
    estimate_double_density,
    estimate_natural_density,
    exact_density,
    parse_index_set,
    prefix_density,
    prefix_density2,
)
from metriclike.verdict import Verdict


def block_set():
    """Indices in [4^k, 2 * 4^k); prefix densities swing between 1/3 and 2/3."""
    return Predicate(lambda n: n.bit_length() % 2 == 1, description="odd bit length")


def test_prefix_density_examples():
    assert prefix_density(All(), 7) == 1
    assert prefix_density(Finite(), 100) == 0
    assert prefix_density(Squares(), 100) == Fraction(10, 100)


@pytest.mark.parametrize(
    "index_set, expected",
    [
        (Squares(), 0),
        (Arith(2, 2), Fraction(1, 2)),
        (Complement(Squares()), 1),
        (Finite([1, 5, 9]), 0),
        (All(), 1),
        (Union([Arith(2, 2), Arith(3, 3)]), Fraction(2, 3)),
        (Intersection([Arith(2, 2), Arith(3, 3)]), Fraction(1, 6)),
        (Complement(Union([Arith(4, 1), Squares()])), Fraction(3, 4)),
    ],
)
def test_exact_density(index_set, expected):
    assert exact_density(index_set) == expected


def test_predicate_has_no_closed_form():
    assert exact_density(block_set()) is None


small = st.integers(min_value=1, max_value=400)
leaf = st.one_of(
    st.just(All()),
    st.just(Squares()),
    st.builds(Arith, st.integers(1, 7), st.integers(1, 9)),
    st.lists(st.integers(1, 300), max_size=6).map(Finite),
)
sets = st.recursive(
    leaf,
    lambda inner: st.one_of(
        inner.map(Complement),
        st.lists(inner, min_size=1, max_size=3).map(Union),
        st.lists(inner, min_size=1, max_size=3).map(Intersection),
    ),
    max_leaves=6,
)


@settings(max_examples=80, deadline=None)
@given(sets, small)
def test_counts_match_membership_scan(index_set, n):
    brute = sum(1 for m in range(1, n + 1) if m in index_set)
    assert index_set.prefix_count(n) == brute
    assert list(index_set.mask(n)) == [m in index_set for m in range(1, n + 1)]


@settings(max_examples=80, deadline=None)
@given(sets, small)
def test_complement_identity(index_set, n):
    assert index_set.prefix_count(n) + Complement(index_set).prefix_count(n) == n


@settings(max_examples=60, deadline=None)
@given(sets)
def test_exact_density_agrees_with_long_prefix(index_set):
    d = exact_density(index_set)
    if d is not None:
        n = 200_000
        # at most six leaves, each a squares set (sqrt(n) elements) or up to six finite indices
        assert abs(prefix_density(index_set, n) - d) <= Fraction(6 * math.isqrt(n) + 36, n)


def test_natural_density_estimates():
    est = estimate_natural_density(Squares())
    assert est.verdict is Verdict.PASS
    assert est.final == Fraction(1, 1000)
    assert est.counts == (31, 100, 316, 1000)
    assert estimate_natural_density(All(), (5, 10, 20, 40)).limit == 1


def test_block_set_is_inconclusive():
    schedule = tuple(2**p - 1 for p in range(12, 20))
    est = estimate_natural_density(block_set(), schedule, Fraction(1, 100))
    assert est.verdict is Verdict.INCONCLUSIVE
    assert est.limit is None
    lows = [v for v in est.values if v < Fraction(1, 2)]
    highs = [v for v in est.values if v > Fraction(1, 2)]
    assert lows and highs
    assert all(abs(v - Fraction(1, 3)) < Fraction(1, 100) for v in lows)
    assert all(abs(v - Fraction(2, 3)) < Fraction(1, 100) for v in highs)


def test_schedule_validation():
    with pytest.raises(ValueError):
        estimate_natural_density(All(), (10, 100, 1000))
    with pytest.raises(ValueError):
        estimate_natural_density(All(), (10, 100, 100, 1000))
    with pytest.raises(ValueError):
        estimate_double_density(Product(All(), All()), (10,))


def test_default_schedule():
    assert default_schedule(10**6) == (10**3, 10**4, 10**5, 10**6)
    assert default_schedule(10) == (2, 5, 7, 10)
    with pytest.raises(ValueError):
        default_schedule(3)


def test_double_density_examples():
    assert prefix_density2(Product(Squares(), Squares()), 100, 100) == Fraction(100, 10000)
    assert prefix_density2(BandMin(5), 100, 100) == Fraction(4 * 100 + 4 * 100 - 16, 10000)
    assert prefix_density2(Product(All(), All()), 7, 9) == 1
    est = estimate_double_density(Product(Squares(), All()), (10**3, 10**4))
    assert est.values == (Fraction(31, 1000), Fraction(100, 10**4))
    assert estimate_double_density(BandMin(7), (10**3, 10**4, 10**5)).verdict is Verdict.PASS


pair_sets = st.one_of(
    st.builds(Product, leaf, leaf),
    st.builds(BandMin, st.integers(1, 30)),
)


@settings(max_examples=60, deadline=None)
@given(st.lists(pair_sets, min_size=1, max_size=3).map(Union2), st.integers(1, 60), st.integers(1, 60))
def test_double_counts_match_scan(pairs, m, n):
    brute = sum(1 for i in range(1, m + 1) for j in range(1, n + 1) if (i, j) in pairs)
    assert pairs.count(m, n) == brute


def test_predicate2_falls_back_to_scan():
    diag = Predicate2(lambda i, j: i == j)
    assert diag.count(30, 50) == 30
    assert Predicate2(lambda i, j: True, counter=lambda m, n: m * n).count(4, 5) == 20


def test_predicate_uses_supplied_mask_and_extends():
    calls = []

    def test(n):
        calls.append(n)
        return n % 3 == 0

    mask = np.array([(n % 3 == 0) for n in range(1, 11)])
    p = Predicate(test, mask=mask)
    assert p.prefix_count(10) == 3
    assert not calls
    assert p.prefix_count(12) == 4
    assert calls == [11, 12]
    assert p.cached_to == 12


@pytest.mark.parametrize(
    "text, n, count",
    [
        ("all", 10, 10),
        ("squares", 100, 10),
        ("arith:3,2", 10, 3),
        ("finite:[1, 4, 200]", 100, 2),
        ("complement(squares)", 100, 90),
        ("union(arith:2,2;arith:3,3)", 12, 8),
        ("intersection(arith:2,2;complement(squares))", 16, 6),
    ],
)
def test_parse_index_set(text, n, count):
    assert parse_index_set(text).prefix_count(n) == count


@pytest.mark.parametrize("bad", ["evens", "arith:2", "complement(all;all)", "union(all", "finite:[0]"])
def test_parse_index_set_rejects(bad):
    with pytest.raises(ValueError):
        parse_index_set(bad)
