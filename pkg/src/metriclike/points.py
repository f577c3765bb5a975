"""Exact point values: rationals extended by named irrational tags.

A :class:`PointValue` is ``q + c1*t1 + c2*t2 + ...`` where ``q`` and the
``ci`` are exact rationals and each ``ti`` is a tag such as ``sqrt2``.  Tags
are opaque: two values are equal only when their rational parts and tag
coefficients agree structurally.  Ordering goes through the tag approximants,
which is sound as long as distinct values used together differ by more than
``MIN_GAP``.
"""

from __future__ import annotations

import re
from decimal import Decimal
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Union

__all__ = [
    "MIN_GAP",
    "PointValue",
    "register_tag",
    "tag_approximant",
    "known_tags",
    "parse_point",
    "as_point",
    "as_fraction",
]

#: Distinct represented values are assumed to differ by more than this.
MIN_GAP = Fraction(1, 10**9)

_MIN_DIGITS = 12

_TAGS: dict[str, Fraction] = {}


def _significant_digits(text: str) -> int:
    digits = text.lstrip("+-").replace(".", "").lstrip("0")
    return len(digits)


def register_tag(name: str, approximant: Union[str, Fraction, Decimal]) -> Fraction:
    """Register an irrational tag and return its stored approximant.

    The approximant must carry at least 12 significant decimal digits.  A
    tag can be registered again with a compatible approximant (one within
    ``MIN_GAP`` of the stored one); the first registration is kept.
    """
    if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
        raise ValueError(f"invalid tag name {name!r}")
    if isinstance(approximant, str):
        if not re.fullmatch(r"[+-]?\d+\.\d+", approximant.strip()):
            raise ValueError(f"tag approximant must be a decimal literal, got {approximant!r}")
        if _significant_digits(approximant.strip()) < _MIN_DIGITS:
            raise ValueError(
                f"tag approximant {approximant!r} has fewer than {_MIN_DIGITS} significant digits"
            )
        value = Fraction(approximant.strip())
    else:
        value = Fraction(approximant)
    if value <= 0:
        # Tags stand for positive irrationals; signs go on coefficients.
        raise ValueError(f"tag {name!r} must have a positive approximant")
    stored = _TAGS.get(name)
    if stored is None:
        _TAGS[name] = value
        return value
    if abs(stored - value) > MIN_GAP:
        raise ValueError(
            f"tag {name!r} already registered with approximant {float(stored)!r}, "
            f"incompatible with {float(value)!r}"
        )
    return stored


def tag_approximant(name: str) -> Fraction:
    try:
        return _TAGS[name]
    except KeyError:
        raise KeyError(f"unknown irrational tag {name!r}; give it as irr:{name}~<decimal>") from None


def known_tags() -> dict[str, Fraction]:
    return dict(_TAGS)


for _name, _digits in {
    "sqrt2": "1.41421356237309504880168872420969808",
    "sqrt3": "1.73205080756887729352744634150587237",
    "sqrt5": "2.23606797749978969640917366873127624",
    "pi": "3.14159265358979323846264338327950288",
    "e": "2.71828182845904523536028747135266250",
}.items():
    register_tag(_name, _digits)


def as_fraction(value) -> Fraction:
    """Coerce an int, Fraction or tag-free PointValue to a Fraction."""
    if isinstance(value, PointValue):
        if value.terms:
            raise ValueError(f"{value} carries irrational tags; a rational was required")
        return value.rational
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return as_fraction(parse_point(value))
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


class PointValue:
    """An exact rational plus a finite combination of irrational tags.

    >>> PointValue(Fraction(7, 2))
    PointValue('7/2')
    >>> PointValue.tag("sqrt2") + 1
    PointValue('1 + irr:sqrt2')
    """

    __slots__ = ("rational", "terms", "_approx", "_hash")

    def __init__(self, rational=0, terms: Union[Mapping[str, Fraction], Iterable, None] = None):
        if isinstance(rational, PointValue):
            raise TypeError("use PointValue arithmetic instead of nesting values")
        self.rational = Fraction(rational)
        items = dict(terms or {})
        cleaned = []
        for name, coeff in items.items():
            coeff = Fraction(coeff)
            if coeff:
                tag_approximant(name)
                cleaned.append((name, coeff))
        self.terms: tuple[tuple[str, Fraction], ...] = tuple(sorted(cleaned))
        self._approx = None
        self._hash = None

    @classmethod
    def tag(cls, name: str, coefficient=1) -> "PointValue":
        return cls(0, {name: coefficient})

    def is_irrational(self) -> bool:
        return bool(self.terms)

    @property
    def approx(self) -> Fraction:
        """Rational approximant used for ordering."""
        if self._approx is None:
            total = self.rational
            for name, coeff in self.terms:
                total += coeff * tag_approximant(name)
            self._approx = total
        return self._approx

    def _coerce(self, other) -> "PointValue | None":
        if isinstance(other, PointValue):
            return other
        if isinstance(other, (int, Rational)):
            return PointValue(other)
        return None

    # structural equality

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.rational == other.rational and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            if not self.terms:
                self._hash = hash(self.rational)
            else:
                self._hash = hash((self.rational, self.terms))
        return self._hash

    # ordering through approximants

    def __lt__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self != other and self.approx < other.approx

    def __le__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self == other or self.approx < other.approx

    def __gt__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self != other and self.approx > other.approx

    def __ge__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self == other or self.approx > other.approx

    def sign(self) -> int:
        if not self.terms:
            return (self.rational > 0) - (self.rational < 0)
        a = self.approx
        return (a > 0) - (a < 0)

    # arithmetic

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        merged = dict(self.terms)
        for name, coeff in other.terms:
            merged[name] = merged.get(name, 0) + coeff
        return PointValue(self.rational + other.rational, merged)

    __radd__ = __add__

    def __neg__(self):
        return PointValue(-self.rational, {n: -c for n, c in self.terms})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.terms and other.terms:
            raise ValueError("product of two irrational-tagged values is not representable")
        if other.terms:
            self, other = other, self
        factor = other.rational
        return PointValue(self.rational * factor, {n: c * factor for n, c in self.terms})

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.terms:
            raise ValueError("division by an irrational-tagged value is not representable")
        if other.rational == 0:
            raise ZeroDivisionError("division by zero")
        factor = other.rational
        return PointValue(self.rational / factor, {n: c / factor for n, c in self.terms})

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __bool__(self):
        return bool(self.rational) or bool(self.terms)

    def __float__(self):
        return float(self.approx)

    # rendering

    def __str__(self):
        parts = []
        if self.rational or not self.terms:
            parts.append(_fraction_text(self.rational))
        for name, coeff in self.terms:
            tag = f"irr:{name}"
            if coeff == 1:
                parts.append(tag)
            elif coeff == -1:
                parts.append(f"-{tag}")
            else:
                parts.append(f"{_fraction_text(coeff)}*{tag}")
        text = parts[0]
        for part in parts[1:]:
            text += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
        return text

    def literal(self) -> str:
        """Render in the point literal syntax, with approximants on tags."""
        if not self.terms:
            return _fraction_text(self.rational)
        if self.rational == 0 and len(self.terms) == 1 and self.terms[0][1] == 1:
            name = self.terms[0][0]
            return f"irr:{name}~{_approx_text(tag_approximant(name))}"
        raise ValueError(f"{self} has no single-literal form")

    def __repr__(self):
        return f"PointValue({str(self)!r})"


def _fraction_text(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _approx_text(q: Fraction) -> str:
    text = f"{Decimal(q.numerator) / Decimal(q.denominator):.30f}".rstrip("0")
    return text if not text.endswith(".") else text + "0"


_RATIONAL_RE = re.compile(r"[+-]?\d+(?:/\d+|\.\d+)?")
_IRR_RE = re.compile(r"irr:([A-Za-z_][A-Za-z0-9_]*)(?:~([+-]?\d+\.\d+))?")


def parse_point(text: str) -> PointValue:
    """Parse a point literal: ``2``, ``7/2``, ``0.25`` or ``irr:sqrt2~1.414213562373``."""
    s = text.strip()
    if _RATIONAL_RE.fullmatch(s):
        try:
            return PointValue(Fraction(s))
        except ZeroDivisionError:
            raise ValueError(f"zero denominator in point literal {text!r}") from None
    m = _IRR_RE.fullmatch(s)
    if m:
        name, approx = m.groups()
        if approx is not None:
            register_tag(name, approx)
        else:
            tag_approximant(name)
        return PointValue.tag(name)
    raise ValueError(f"malformed point literal {text!r}")


def as_point(value) -> PointValue:
    if isinstance(value, PointValue):
        return value
    if isinstance(value, str):
        return parse_point(value)
    if isinstance(value, (int, Rational)):
        return PointValue(value)
    raise TypeError(f"cannot interpret {value!r} as a point")
