from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from metriclike.points import (
    MIN_GAP,
    PointValue,
    as_fraction,
    as_point,
    known_tags,
    parse_point,
    register_tag,
    tag_approximant,
)

fractions = st.fractions(min_value=-1000, max_value=1000, max_denominator=1000)


@pytest.mark.parametrize(
    "text, expected",
    [("2", Fraction(2)), ("7/2", Fraction(7, 2)), ("0.25", Fraction(1, 4)), ("-3", Fraction(-3))],
)
def test_parse_rational_literals(text, expected):
    p = parse_point(text)
    assert not p.is_irrational()
    assert p.rational == expected


def test_parse_tag_with_compatible_approximant():
    p = parse_point("irr:sqrt2~1.414213562373")
    assert p == PointValue.tag("sqrt2")
    assert abs(p.approx - Fraction(14142135623730950488, 10**19)) < MIN_GAP


def test_tag_approximant_needs_twelve_digits():
    with pytest.raises(ValueError):
        parse_point("irr:fresh_tag~1.4142")


def test_incompatible_reregistration_is_rejected():
    with pytest.raises(ValueError):
        register_tag("sqrt2", "1.414213572373")


def test_new_tag_registration_is_kept():
    register_tag("golden", "1.61803398874989484820")
    assert "golden" in known_tags()
    assert register_tag("golden", "1.618033988749") == tag_approximant("golden")


def test_unknown_tag_without_approximant():
    with pytest.raises(KeyError):
        parse_point("irr:never_registered_tag")


@pytest.mark.parametrize("bad", ["", "1/0", "abc", "irr:", "1//2"])
def test_malformed_literals(bad):
    with pytest.raises(ValueError):
        parse_point(bad)


def test_tag_arithmetic_rules():
    r2 = PointValue.tag("sqrt2")
    assert (r2 + 1) - 1 == r2
    assert (r2 * 3).approx == 3 * r2.approx
    assert r2 / 2 + r2 / 2 == r2
    assert r2 - r2 == 0
    with pytest.raises(ValueError):
        r2 * r2
    with pytest.raises(ValueError):
        1 / r2
    with pytest.raises(ZeroDivisionError):
        r2 / 0


def test_equality_is_structural_not_numeric():
    # an approximant-valued rational is not the irrational it approximates
    assert PointValue(tag_approximant("sqrt2")) != PointValue.tag("sqrt2")


def test_ordering_uses_approximants():
    assert PointValue.tag("sqrt2") < Fraction(3, 2)
    assert PointValue.tag("pi") > 3
    assert sorted([PointValue.tag("e"), PointValue(1), PointValue.tag("sqrt3")]) == [
        PointValue(1),
        PointValue.tag("sqrt3"),
        PointValue.tag("e"),
    ]


def test_str_and_literal():
    assert str(PointValue(Fraction(7, 2))) == "7/2"
    assert str(PointValue.tag("sqrt2") + 1) == "1 + irr:sqrt2"
    assert parse_point(PointValue.tag("sqrt5").literal()) == PointValue.tag("sqrt5")
    with pytest.raises(ValueError):
        (PointValue.tag("sqrt5") + 1).literal()


def test_as_fraction_rejects_tags():
    assert as_fraction("3/4") == Fraction(3, 4)
    with pytest.raises(ValueError):
        as_fraction(PointValue.tag("sqrt2"))
    with pytest.raises(TypeError):
        as_fraction(0.5)


@given(fractions, fractions)
def test_rational_arithmetic_matches_fraction(a, b):
    pa, pb = as_point(a), as_point(b)
    assert (pa + pb).rational == a + b
    assert (pa - pb).rational == a - b
    assert (pa * pb).rational == a * b
    if b:
        assert (pa / pb).rational == a / b
    assert (pa < pb) == (a < b)
    assert (pa == pb) == (a == b)
    assert abs(pa).rational == abs(a)


@given(fractions, fractions, fractions)
def test_tagged_linear_combinations(q, c1, c2):
    x = q + PointValue.tag("sqrt2", c1) + PointValue.tag("pi", c2)
    assert x - PointValue.tag("sqrt2", c1) - PointValue.tag("pi", c2) == as_point(q)
    assert x.is_irrational() == bool(c1 or c2)
    assert hash(x) == hash(x + 0)
