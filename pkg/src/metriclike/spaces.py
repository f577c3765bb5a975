"""Metric-like spaces, the built-in example spaces, and sample axiom checks."""

from __future__ import annotations

import itertools
from bisect import bisect_left, bisect_right
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .arrays import ValueArray
from .points import PointValue, as_point

__all__ = [
    "CarrierError",
    "MetricLikeSpace",
    "SumSpace",
    "IrrationalSumSpace",
    "MaxSpace",
    "SUM",
    "IRRATIONAL_SUM",
    "MAX",
    "builtin_space",
    "BUILTIN_SPACES",
    "AxiomResult",
    "AxiomReport",
    "check_axioms",
    "ball_member",
]


class CarrierError(ValueError):
    """A point lies outside the carrier set of a space."""


class MetricLikeSpace:
    """A named distance function over :class:`PointValue`.

    ``delta`` receives two points already checked against ``carrier`` and
    returns a nonnegative PointValue (ints and Fractions are accepted too).
    The vectorized hooks :meth:`distances_to`, :meth:`distance_row` and
    :meth:`count_pairs_outside` fall back to scalar loops; the built-in
    spaces override them with exact bulk versions.
    """

    def __init__(
        self,
        name: str,
        delta: Callable[[PointValue, PointValue], object],
        carrier: Optional[Callable[[PointValue], bool]] = None,
        description: str = "",
    ):
        self.name = name
        self._delta = delta
        self._carrier = carrier
        self.description = description

    def __repr__(self):
        return f"<{type(self).__name__} {self.name!r}>"

    def contains(self, x) -> bool:
        x = as_point(x)
        return self._carrier is None or bool(self._carrier(x))

    def check(self, x) -> PointValue:
        x = as_point(x)
        if not self.contains(x):
            raise CarrierError(f"{x} is outside the carrier of the {self.name!r} space")
        return x

    def distance(self, x, y) -> PointValue:
        x = self.check(x)
        y = self.check(y)
        d = as_point(self._delta(x, y))
        if d.sign() < 0:
            raise ValueError(f"{self.name!r} distance of ({x}, {y}) is negative: {d}")
        return d

    # bulk hooks

    def carrier_mask(self, xs: ValueArray) -> np.ndarray:
        if self._carrier is None:
            return np.ones(len(xs), dtype=bool)
        return np.array([bool(self._carrier(p)) for p in xs.points()], dtype=bool)

    def check_many(self, xs: ValueArray) -> None:
        bad = np.flatnonzero(~self.carrier_mask(xs))
        if len(bad):
            i = int(bad[0])
            err = CarrierError(f"{xs.point(i)} (position {i}) is outside the carrier of the {self.name!r} space")
            err.position = i
            raise err

    def distances_to(self, xs: ValueArray, y) -> ValueArray:
        """``delta(x_i, y)`` for every element of ``xs``."""
        y = self.check(y)
        return ValueArray.from_points([self.distance(x, y) for x in xs.points()])

    def distance_row(self, x, ys: ValueArray) -> ValueArray:
        """``delta(x, y_j)`` for every element of ``ys``."""
        x = self.check(x)
        return ValueArray.from_points([self.distance(x, y) for y in ys.points()])

    def count_pairs_outside(self, xs: ValueArray, ys: ValueArray, low=None, high=None, strict_high=False) -> int:
        """Count pairs (i, j) with ``delta(x_i, y_j) <= low`` or ``>= high``.

        Either bound may be None.  With ``strict_high`` the upper test is
        ``> high``.  The two tests must not overlap (``low < high``).
        """
        low = None if low is None else Fraction(low)
        high = None if high is None else Fraction(high)
        total = 0
        for i in range(len(xs)):
            row = self.distance_row(xs.point(i), ys).approx()
            hit = np.zeros(len(ys), dtype=bool)
            if low is not None:
                hit |= row.cmp_value(low) <= 0
            if high is not None:
                c = row.cmp_value(high)
                hit |= (c > 0) if strict_high else (c >= 0)
            total += int(hit.sum())
        return total


def _nonneg(x: PointValue) -> bool:
    return x.sign() >= 0


def _positive(x: PointValue) -> bool:
    return x.sign() > 0


class _SumFormSpace(MetricLikeSpace):
    """delta(x, y) = x + y except on a set of equal pairs, where it is 0."""

    strict_positive = False

    def __init__(self, name, description=""):
        carrier = _positive if self.strict_positive else _nonneg
        super().__init__(name, self._scalar, carrier, description)

    def zero_on_equal(self, x: PointValue) -> bool:
        raise NotImplementedError

    def zero_on_equal_mask(self, xs: ValueArray) -> np.ndarray:
        raise NotImplementedError

    def _scalar(self, x, y):
        if x == y and self.zero_on_equal(x):
            return PointValue(0)
        return x + y

    def carrier_mask(self, xs):
        s = xs.approx().sign()
        return s > 0 if self.strict_positive else s >= 0

    def distances_to(self, xs, y):
        y = self.check(y)
        self.check_many(xs)
        total = xs + y
        zero = xs.eq(y) & self.zero_on_equal_mask(xs)
        if zero.any():
            total = total.where(~zero, PointValue(0))
        return total

    def distance_row(self, x, ys):
        # symmetric by construction
        return self.distances_to(ys, x)

    def _value_table(self, xs: ValueArray):
        """Sorted distinct approximants with multiplicities and zero-branch flags."""
        approx = xs.approx().reduced()
        zero = self.zero_on_equal_mask(xs)
        counts: Counter = Counter()
        special: Counter = Counter()
        for a, b, z in zip(approx.num, approx.den, zero):
            key = Fraction(int(a), int(b))
            counts[key] += 1
            if z:
                special[key] += 1
        keys = sorted(counts)
        cumulative = list(itertools.accumulate(counts[k] for k in keys))
        return keys, cumulative, counts, special

    def count_pairs_outside(self, xs, ys, low=None, high=None, strict_high=False):
        self.check_many(xs)
        self.check_many(ys)
        low = None if low is None else Fraction(low)
        high = None if high is None else Fraction(high)
        xkeys, _, xcounts, xspecial = self._value_table(xs)
        ykeys, ycum, ycounts, yspecial = self._value_table(ys)
        ny = len(ys)

        def le(t):  # number of y with y <= t
            i = bisect_right(ykeys, t)
            return ycum[i - 1] if i else 0

        def lt(t):
            i = bisect_left(ykeys, t)
            return ycum[i - 1] if i else 0

        def outside(d):
            return (low is not None and d <= low) or (
                high is not None and (d > high if strict_high else d >= high)
            )

        total = 0
        for x in xkeys:
            hits = 0
            if low is not None:
                hits += le(low - x)
            if high is not None:
                hits += ny - (le(high - x) if strict_high else lt(high - x))
            total += xcounts[x] * hits
        # equal pairs taking the zero branch were counted as 2x above
        for key, cx in xspecial.items():
            cy = yspecial.get(key, 0)
            if cy:
                total += cx * cy * (int(outside(Fraction(0))) - int(outside(2 * key)))
        return total


class SumSpace(_SumFormSpace):
    """delta(x, y) = 0 when x = y, otherwise x + y, on nonnegative points."""

    def __init__(self):
        super().__init__("sum", "0 if x = y, else x + y, on the nonnegative reals")

    def zero_on_equal(self, x):
        return True

    def zero_on_equal_mask(self, xs):
        return np.ones(len(xs), dtype=bool)


class IrrationalSumSpace(_SumFormSpace):
    """delta(x, y) = 0 when x = y is irrational, otherwise x + y, on positive points."""

    strict_positive = True

    def __init__(self):
        super().__init__("irrational_sum", "0 if x = y and x is irrational, else x + y, on the positive reals")

    def zero_on_equal(self, x):
        return x.is_irrational()

    def zero_on_equal_mask(self, xs):
        return xs.is_irrational()


class MaxSpace(MetricLikeSpace):
    """delta(x, y) = max(x, y) on nonnegative points.

    Every point has self-distance equal to itself, which is what lets a
    sequence converge statistically to several limits at once.
    """

    def __init__(self):
        super().__init__("max", self._scalar, _nonneg, "max(x, y) on the nonnegative reals")

    @staticmethod
    def _scalar(x, y):
        return x if x >= y else y

    def carrier_mask(self, xs):
        return xs.approx().sign() >= 0

    def distances_to(self, xs, y):
        y = self.check(y)
        self.check_many(xs)
        ge = xs.approx().cmp_value(y.approx) >= 0
        return xs.where(ge, y)

    def distance_row(self, x, ys):
        return self.distances_to(ys, x)

    def count_pairs_outside(self, xs, ys, low=None, high=None, strict_high=False):
        self.check_many(xs)
        self.check_many(ys)
        ax, ay = xs.approx(), ys.approx()

        def count_le(arr, t):
            return int((arr.cmp_value(t) <= 0).sum())

        def count_lt(arr, t):
            return int((arr.cmp_value(t) < 0).sum())

        total = 0
        if low is not None:
            total += count_le(ax, low) * count_le(ay, low)
        if high is not None:
            if strict_high:
                below = count_le(ax, high) * count_le(ay, high)
            else:
                below = count_lt(ax, high) * count_lt(ay, high)
            total += len(xs) * len(ys) - below
        return total


SUM = SumSpace()
IRRATIONAL_SUM = IrrationalSumSpace()
MAX = MaxSpace()

BUILTIN_SPACES = {space.name: space for space in (SUM, IRRATIONAL_SUM, MAX)}


def builtin_space(name: str) -> MetricLikeSpace:
    """Return one of the built-in spaces: ``sum``, ``irrational_sum`` or ``max``.

    ``max`` is not one of the worked examples; it exists to exhibit a
    statistically convergent sequence with more than one limit.
    """
    try:
        return BUILTIN_SPACES[name]
    except KeyError:
        raise ValueError(f"unknown space {name!r}; expected one of {sorted(BUILTIN_SPACES)}") from None


@dataclass(frozen=True)
class AxiomResult:
    axiom: str
    passed: bool
    witness: Optional[tuple] = None
    checked: int = 0


@dataclass(frozen=True)
class AxiomReport:
    space: str
    sample_size: int
    results: tuple

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, axiom: str) -> AxiomResult:
        for r in self.results:
            if r.axiom == axiom:
                return r
        raise KeyError(axiom)


def check_axioms(space: MetricLikeSpace, sample: Sequence) -> AxiomReport:
    """Exhaustively check the three axioms over a finite sample.

    identity: delta(x, y) = 0 implies x = y, over all ordered pairs;
    symmetry: delta(x, y) = delta(y, x), over all ordered pairs;
    triangle: delta(x, z) <= delta(x, y) + delta(y, z), over all ordered triples.
    Each failing axiom carries the first violating tuple.
    """
    points = [space.check(p) for p in sample]
    if not points:
        raise ValueError("sample must be nonempty")
    size = len(points)
    table = [[space.distance(x, y) for y in points] for x in points]

    identity = symmetry = triangle = None
    for i, j in itertools.product(range(size), repeat=2):
        if identity is None and table[i][j].sign() == 0 and points[i] != points[j]:
            identity = (points[i], points[j])
        if symmetry is None and table[i][j] != table[j][i]:
            symmetry = (points[i], points[j])
    # ordering by approximant is exact on rational samples
    approx = [[d.approx for d in row] for row in table]
    for i, j, k in itertools.product(range(size), repeat=3):
        if approx[i][k] > approx[i][j] + approx[j][k]:
            lhs, rhs = table[i][k], table[i][j] + table[j][k]
            if lhs > rhs:
                triangle = (points[i], points[j], points[k])
                break

    results = (
        AxiomResult("identity", identity is None, identity, size * size),
        AxiomResult("symmetry", symmetry is None, symmetry, size * size),
        AxiomResult("triangle", triangle is None, triangle, size**3),
    )
    return AxiomReport(space.name, size, results)


def ball_member(space: MetricLikeSpace, center, radius, point) -> bool:
    """True iff ``|delta(point, center) - delta(center, center)| < radius``."""
    r = as_point(radius)
    if r.sign() <= 0:
        raise ValueError(f"ball radius must be positive, got {radius}")
    gap = abs(space.distance(point, center) - space.distance(center, center))
    return gap < r
