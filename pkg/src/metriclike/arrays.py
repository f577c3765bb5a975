"""Vectorized exact arithmetic over blocks of indices.

Scanning a sequence up to a horizon of 10**6 one ``Fraction`` at a time is
too slow, so blocks of values are held as numpy ``object`` arrays of Python
ints (numerator, denominator pairs).  Nothing is rounded: comparisons are
done by cross-multiplication, and fractions are left unreduced until a
caller asks for :meth:`RationalArray.reduced`.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .points import PointValue, tag_approximant

__all__ = ["RationalArray", "ValueArray"]


def _obj(values) -> np.ndarray:
    arr = np.asarray(values, dtype=object)
    return arr


class RationalArray:
    """Elementwise exact rationals ``num / den`` with ``den > 0``."""

    __slots__ = ("num", "den")

    def __init__(self, num: np.ndarray, den: np.ndarray):
        self.num = num
        self.den = den

    @classmethod
    def from_ints(cls, ints) -> "RationalArray":
        num = np.asarray(ints).astype(object)
        return cls(num, np.ones(len(num), dtype=object))

    @classmethod
    def constant(cls, q, size: int) -> "RationalArray":
        q = Fraction(q)
        return cls(np.full(size, q.numerator, dtype=object), np.full(size, q.denominator, dtype=object))

    @classmethod
    def zeros(cls, size: int) -> "RationalArray":
        return cls.constant(0, size)

    def __len__(self):
        return len(self.num)

    def __add__(self, other: "RationalArray") -> "RationalArray":
        if isinstance(other, RationalArray):
            return RationalArray(self.num * other.den + other.num * self.den, self.den * other.den)
        q = Fraction(other)
        return RationalArray(self.num * q.denominator + q.numerator * self.den, self.den * q.denominator)

    def __neg__(self) -> "RationalArray":
        return RationalArray(-self.num, self.den)

    def __sub__(self, other) -> "RationalArray":
        if isinstance(other, RationalArray):
            return self + (-other)
        return self + (-Fraction(other))

    def __mul__(self, other) -> "RationalArray":
        if isinstance(other, RationalArray):
            return RationalArray(self.num * other.num, self.den * other.den)
        q = Fraction(other)
        return RationalArray(self.num * q.numerator, self.den * q.denominator)

    def __truediv__(self, other) -> "RationalArray":
        if not isinstance(other, RationalArray):
            q = Fraction(other)
            if q == 0:
                raise ZeroDivisionError("division by zero")
            other = RationalArray.constant(q, len(self))
        zero = other.num == 0
        if zero.any():
            err = ZeroDivisionError("division by zero")
            err.positions = np.flatnonzero(zero)
            raise err
        num = self.num * other.den
        den = self.den * other.num
        neg = other.num < 0
        if neg.any():
            num = np.where(neg, -num, num)
            den = np.where(neg, -den, den)
        return RationalArray(num, den)

    def sign(self) -> np.ndarray:
        return np.sign(self.num).astype(np.int8)

    def is_zero(self) -> np.ndarray:
        return (self.num == 0).astype(bool)

    def eq(self, other: "RationalArray") -> np.ndarray:
        return (self.num * other.den == other.num * self.den).astype(bool)

    def eq_value(self, q) -> np.ndarray:
        q = Fraction(q)
        return (self.num * q.denominator == q.numerator * self.den).astype(bool)

    def cmp_value(self, q) -> np.ndarray:
        """Elementwise sign of ``self - q``."""
        q = Fraction(q)
        return np.sign(self.num * q.denominator - q.numerator * self.den).astype(np.int8)

    def abs_ge(self, q) -> np.ndarray:
        """Elementwise ``|self| >= q``."""
        q = Fraction(q)
        return (np.abs(self.num) * q.denominator >= q.numerator * self.den).astype(bool)

    def take(self, idx) -> "RationalArray":
        return RationalArray(self.num[idx], self.den[idx])

    def put(self, idx, other: "RationalArray") -> None:
        self.num[idx] = other.num
        self.den[idx] = other.den

    def where(self, mask, other: "RationalArray") -> "RationalArray":
        return RationalArray(np.where(mask, self.num, other.num), np.where(mask, self.den, other.den))

    def reduced(self) -> "RationalArray":
        g = np.gcd(self.num, self.den)
        g = np.where(g == 0, 1, g)
        return RationalArray(self.num // g, self.den // g)

    def fraction_at(self, i: int) -> Fraction:
        return Fraction(int(self.num[i]), int(self.den[i]))

    def to_fractions(self) -> list[Fraction]:
        return [Fraction(int(a), int(b)) for a, b in zip(self.num, self.den)]

    def copy(self) -> "RationalArray":
        return RationalArray(self.num.copy(), self.den.copy())


class ValueArray:
    """Elementwise :class:`PointValue`: a rational part plus tag coefficients.

    Tags absent from ``terms`` have coefficient zero everywhere.  The same
    representability rules as for scalars apply: tagged values can be added
    and scaled by rationals, never multiplied or divided by each other.
    """

    __slots__ = ("rational", "terms")

    def __init__(self, rational: RationalArray, terms: dict[str, RationalArray] | None = None):
        self.rational = rational
        self.terms = dict(terms or {})

    @classmethod
    def full(cls, point: PointValue, size: int) -> "ValueArray":
        return cls(
            RationalArray.constant(point.rational, size),
            {name: RationalArray.constant(c, size) for name, c in point.terms},
        )

    @classmethod
    def zeros(cls, size: int) -> "ValueArray":
        return cls(RationalArray.zeros(size))

    @classmethod
    def from_rational(cls, values: RationalArray) -> "ValueArray":
        return cls(values)

    @classmethod
    def from_points(cls, points) -> "ValueArray":
        points = list(points)
        size = len(points)
        rational = RationalArray(
            _obj([p.rational.numerator for p in points]) if size else np.empty(0, dtype=object),
            _obj([p.rational.denominator for p in points]) if size else np.empty(0, dtype=object),
        )
        names = sorted({name for p in points for name, _ in p.terms})
        terms = {}
        for name in names:
            coeffs = [dict(p.terms).get(name, Fraction(0)) for p in points]
            terms[name] = RationalArray(_obj([c.numerator for c in coeffs]), _obj([c.denominator for c in coeffs]))
        return cls(rational, terms)

    def __len__(self):
        return len(self.rational)

    def has_terms(self) -> bool:
        return any((~t.is_zero()).any() for t in self.terms.values())

    def _as_array(self, other) -> "ValueArray":
        if isinstance(other, ValueArray):
            return other
        if isinstance(other, PointValue):
            return ValueArray.full(other, len(self))
        return ValueArray.full(PointValue(other), len(self))

    def __add__(self, other) -> "ValueArray":
        other = self._as_array(other)
        terms = dict(self.terms)
        for name, coeff in other.terms.items():
            terms[name] = terms[name] + coeff if name in terms else coeff
        return ValueArray(self.rational + other.rational, terms)

    __radd__ = __add__

    def __neg__(self) -> "ValueArray":
        return ValueArray(-self.rational, {n: -c for n, c in self.terms.items()})

    def __sub__(self, other) -> "ValueArray":
        return self + (-self._as_array(other))

    def __rsub__(self, other) -> "ValueArray":
        return self._as_array(other) - self

    def __mul__(self, other) -> "ValueArray":
        other = self._as_array(other)
        if self.has_terms() and other.has_terms():
            raise ValueError("product of two irrational-tagged values is not representable")
        if other.has_terms():
            self, other = other, self
        factor = other.rational
        return ValueArray(self.rational * factor, {n: c * factor for n, c in self.terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ValueArray":
        other = self._as_array(other)
        if other.has_terms():
            raise ValueError("division by an irrational-tagged value is not representable")
        factor = other.rational
        return ValueArray(self.rational / factor, {n: c / factor for n, c in self.terms.items()})

    def __rtruediv__(self, other) -> "ValueArray":
        return self._as_array(other) / self

    def approx(self) -> RationalArray:
        total = self.rational
        for name, coeff in self.terms.items():
            total = total + coeff * tag_approximant(name)
        return total

    def is_irrational(self) -> np.ndarray:
        mask = np.zeros(len(self), dtype=bool)
        for coeff in self.terms.values():
            mask |= ~coeff.is_zero()
        return mask

    def eq(self, other) -> np.ndarray:
        """Elementwise structural equality."""
        other = self._as_array(other)
        mask = self.rational.eq(other.rational)
        for name in set(self.terms) | set(other.terms):
            a = self.terms.get(name)
            b = other.terms.get(name)
            if a is None:
                mask &= b.is_zero()
            elif b is None:
                mask &= a.is_zero()
            else:
                mask &= a.eq(b)
        return mask

    def where(self, mask, other) -> "ValueArray":
        """Take ``self`` where ``mask`` is true, ``other`` elsewhere."""
        other = self._as_array(other)
        size = len(self)
        terms = {}
        for name in set(self.terms) | set(other.terms):
            a = self.terms.get(name) or RationalArray.zeros(size)
            b = other.terms.get(name) or RationalArray.zeros(size)
            terms[name] = a.where(mask, b)
        return ValueArray(self.rational.where(mask, other.rational), terms)

    def take(self, idx) -> "ValueArray":
        return ValueArray(self.rational.take(idx), {n: c.take(idx) for n, c in self.terms.items()})

    def put(self, idx, other: "ValueArray") -> None:
        self.rational.put(idx, other.rational)
        for name, coeff in other.terms.items():
            if name not in self.terms:
                self.terms[name] = RationalArray.zeros(len(self))
            self.terms[name].put(idx, coeff)
        for name, coeff in self.terms.items():
            if name not in other.terms:
                coeff.put(idx, RationalArray.zeros(len(other.rational)))

    def __getitem__(self, item) -> "ValueArray":
        return self.take(item)

    def point(self, i: int) -> PointValue:
        return PointValue(
            self.rational.fraction_at(i),
            {name: coeff.fraction_at(i) for name, coeff in self.terms.items()},
        )

    def points(self) -> list[PointValue]:
        return [self.point(i) for i in range(len(self))]
