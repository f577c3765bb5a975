"""Index sets over N and N x N, prefix counts, and density estimates.

Indices start at 1.  Structured sets count their prefixes in closed form;
:class:`Predicate` sets count by scanning (or from a precomputed mask).
``exact_density`` is an oracle used to validate the estimators: it treats
every structured set as "periodic up to a set of density zero", which is
closed under complement, union and intersection.
"""

from __future__ import annotations

import math
import re
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .verdict import Verdict

__all__ = [
    "IndexSet",
    "Finite",
    "Arith",
    "Squares",
    "All",
    "Complement",
    "Union",
    "Intersection",
    "Predicate",
    "IndexSet2",
    "Product",
    "BandMin",
    "Union2",
    "Predicate2",
    "DensityEstimate",
    "DEFAULT_TOL",
    "DEFAULT_SCHEDULE",
    "DEFAULT_GRID",
    "default_schedule",
    "prefix_density",
    "exact_density",
    "estimate_natural_density",
    "prefix_density2",
    "estimate_double_density",
    "parse_index_set",
]

DEFAULT_TOL = Fraction(1, 100)
DEFAULT_SCHEDULE = (10**3, 10**4, 10**5, 10**6)
DEFAULT_GRID = (10**3, 10**4)

# residue tables larger than this are not worth building for an oracle
_MAX_PERIOD = 10**6


def _check_index(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise TypeError(f"index must be an int, got {type(n).__name__}")
    return int(n)


class IndexSet:
    """A decidable subset of N = {1, 2, 3, ...}."""

    def __contains__(self, n) -> bool:
        raise NotImplementedError

    def mask(self, n: int) -> np.ndarray:
        """Boolean membership of 1..n, position i standing for index i + 1."""
        return np.fromiter((m in self for m in range(1, n + 1)), dtype=bool, count=n)

    def prefix_count(self, n: int) -> int:
        """``|{m <= n : m in self}|``."""
        if n <= 0:
            return 0
        return int(self.mask(n).sum())

    def periodic(self) -> Optional[tuple[int, frozenset]]:
        """(period, residues) describing the set up to a density-zero set."""
        return None

    def exact_density(self) -> Optional[Fraction]:
        form = self.periodic()
        if form is None:
            return None
        period, residues = form
        return Fraction(len(residues), period)

    def describe(self) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.describe()

    def __repr__(self):
        return f"<{type(self).__name__} {self.describe()}>"


class Finite(IndexSet):
    def __init__(self, elements: Iterable[int] = ()):
        values = sorted({_check_index(e) for e in elements})
        if values and values[0] < 1:
            raise ValueError("indices start at 1")
        self.elements = tuple(values)
        self._members = frozenset(values)

    def __contains__(self, n):
        return n in self._members

    def prefix_count(self, n):
        return bisect_right(self.elements, n)

    def mask(self, n):
        m = np.zeros(n, dtype=bool)
        idx = [e - 1 for e in self.elements if e <= n]
        m[idx] = True
        return m

    def periodic(self):
        return 1, frozenset()

    def describe(self):
        return "finite:[" + ",".join(map(str, self.elements)) + "]"

    def __eq__(self, other):
        return isinstance(other, Finite) and self.elements == other.elements

    def __hash__(self):
        return hash(("finite", self.elements))


class Arith(IndexSet):
    """The progression {offset, offset + step, offset + 2*step, ...}."""

    def __init__(self, step: int, offset: int):
        step, offset = _check_index(step), _check_index(offset)
        if step < 1 or offset < 1:
            raise ValueError(f"arith needs step >= 1 and offset >= 1, got {step},{offset}")
        self.step = step
        self.offset = offset

    def __contains__(self, n):
        return n >= self.offset and (n - self.offset) % self.step == 0

    def prefix_count(self, n):
        return 0 if n < self.offset else (n - self.offset) // self.step + 1

    def mask(self, n):
        m = np.zeros(n, dtype=bool)
        m[self.offset - 1 :: self.step] = True
        return m

    def periodic(self):
        return self.step, frozenset({self.offset % self.step})

    def describe(self):
        return f"arith:{self.step},{self.offset}"

    def __eq__(self, other):
        return isinstance(other, Arith) and (self.step, self.offset) == (other.step, other.offset)

    def __hash__(self):
        return hash(("arith", self.step, self.offset))


class Squares(IndexSet):
    def __contains__(self, n):
        return n >= 1 and math.isqrt(n) ** 2 == n

    def prefix_count(self, n):
        return math.isqrt(n) if n >= 1 else 0

    def mask(self, n):
        m = np.zeros(n, dtype=bool)
        k = np.arange(1, math.isqrt(n) + 1, dtype=np.int64)
        m[k * k - 1] = True
        return m

    def periodic(self):
        return 1, frozenset()

    def describe(self):
        return "squares"

    def __eq__(self, other):
        return isinstance(other, Squares)

    def __hash__(self):
        return hash("squares")


class All(IndexSet):
    def __contains__(self, n):
        return n >= 1

    def prefix_count(self, n):
        return max(n, 0)

    def mask(self, n):
        return np.ones(n, dtype=bool)

    def periodic(self):
        return 1, frozenset({0})

    def describe(self):
        return "all"

    def __eq__(self, other):
        return isinstance(other, All)

    def __hash__(self):
        return hash("all")


class Complement(IndexSet):
    def __init__(self, inner: IndexSet):
        self.inner = inner

    def __contains__(self, n):
        return n >= 1 and n not in self.inner

    def prefix_count(self, n):
        return max(n, 0) - self.inner.prefix_count(n)

    def mask(self, n):
        return ~self.inner.mask(n)

    def periodic(self):
        form = self.inner.periodic()
        if form is None:
            return None
        period, residues = form
        return period, frozenset(range(period)) - residues

    def describe(self):
        return f"complement({self.inner.describe()})"


def _lift(form, period):
    p, residues = form
    return frozenset(r + i * p for r in residues for i in range(period // p))


class _Combination(IndexSet):
    _word = ""

    def __init__(self, parts: Sequence[IndexSet]):
        self.parts = tuple(parts)
        if not self.parts:
            raise ValueError(f"{self._word} of no sets")

    def _combine_forms(self, combine):
        forms = [p.periodic() for p in self.parts]
        if any(f is None for f in forms):
            return None
        period = reduce(math.lcm, (f[0] for f in forms), 1)
        if period > _MAX_PERIOD:
            return None
        return period, reduce(combine, (_lift(f, period) for f in forms))

    def describe(self):
        return f"{self._word}(" + ";".join(p.describe() for p in self.parts) + ")"


class Union(_Combination):
    _word = "union"

    def __contains__(self, n):
        return any(n in p for p in self.parts)

    def mask(self, n):
        return reduce(np.logical_or, (p.mask(n) for p in self.parts))

    def periodic(self):
        return self._combine_forms(frozenset.union)


class Intersection(_Combination):
    _word = "intersection"

    def __contains__(self, n):
        return all(n in p for p in self.parts)

    def mask(self, n):
        return reduce(np.logical_and, (p.mask(n) for p in self.parts))

    def periodic(self):
        return self._combine_forms(frozenset.intersection)


class Predicate(IndexSet):
    """A set given by a membership test, counted by scanning.

    ``mask`` may supply precomputed membership for 1..len(mask); the scan
    extends the cached mask on demand.
    """

    def __init__(self, test: Callable[[int], bool], mask: Optional[np.ndarray] = None, description: str = "predicate"):
        self.test = test
        self.description = description
        self._mask = np.zeros(0, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
        self._counts = None

    @property
    def cached_to(self) -> int:
        return len(self._mask)

    def _extend(self, n):
        if n > len(self._mask):
            start = len(self._mask) + 1
            extra = np.fromiter((bool(self.test(m)) for m in range(start, n + 1)), dtype=bool, count=n - start + 1)
            self._mask = np.concatenate([self._mask, extra])
            self._counts = None

    def __contains__(self, n):
        if 1 <= n <= len(self._mask):
            return bool(self._mask[n - 1])
        return n >= 1 and bool(self.test(n))

    def mask(self, n):
        self._extend(n)
        return self._mask[:n].copy()

    def prefix_count(self, n):
        if n <= 0:
            return 0
        self._extend(n)
        if self._counts is None:
            self._counts = np.cumsum(self._mask, dtype=np.int64)
        return int(self._counts[n - 1])

    def describe(self):
        return self.description


# ---------------------------------------------------------------- N x N


class IndexSet2:
    """A decidable subset of N x N."""

    def __contains__(self, pair) -> bool:
        raise NotImplementedError

    def count(self, m: int, n: int) -> int:
        """``|{(i, j) in self : i <= m, j <= n}|``."""
        rects = self.rectangles()
        if rects is not None:
            return _count_rectangles(rects, m, n)
        return sum(1 for i in range(1, m + 1) for j in range(1, n + 1) if (i, j) in self)

    def rectangles(self) -> Optional[list[tuple[IndexSet, IndexSet]]]:
        """The set as a union of products A x B, when it has that form."""
        return None

    def describe(self) -> str:
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.describe()}>"


def _count_rectangles(rects, m, n):
    # classify rows by which row-sets contain them, then count columns per class
    if m <= 0 or n <= 0:
        return 0
    signature = np.zeros(m, dtype=object if len(rects) > 62 else np.int64)
    for bit, (rows, _) in enumerate(rects):
        signature = signature + rows.mask(m).astype(signature.dtype) * (1 << bit)
    classes, sizes = np.unique(signature, return_counts=True)
    total = 0
    for sig, size in zip(classes, sizes):
        sig = int(sig)
        if sig == 0:
            continue
        cols = [c for bit, (_, c) in enumerate(rects) if sig >> bit & 1]
        width = cols[0].prefix_count(n) if len(cols) == 1 else Union(cols).prefix_count(n)
        total += int(size) * width
    return total


class Product(IndexSet2):
    def __init__(self, rows: IndexSet, cols: IndexSet):
        self.rows = rows
        self.cols = cols

    def __contains__(self, pair):
        i, j = pair
        return i in self.rows and j in self.cols

    def count(self, m, n):
        return self.rows.prefix_count(m) * self.cols.prefix_count(n)

    def rectangles(self):
        return [(self.rows, self.cols)]

    def describe(self):
        return f"product({self.rows.describe()};{self.cols.describe()})"


class BandMin(IndexSet2):
    """{(m, n) : m < threshold or n < threshold}."""

    def __init__(self, threshold: int):
        threshold = _check_index(threshold)
        if threshold < 1:
            raise ValueError("threshold must be >= 1")
        self.threshold = threshold

    def __contains__(self, pair):
        i, j = pair
        return i < self.threshold or j < self.threshold

    def count(self, m, n):
        r = min(self.threshold - 1, max(m, 0))
        c = min(self.threshold - 1, max(n, 0))
        return r * n + m * c - r * c

    def rectangles(self):
        head = Finite(range(1, self.threshold))
        return [(head, All()), (All(), head)]

    def describe(self):
        return f"bandmin({self.threshold})"


class Union2(IndexSet2):
    def __init__(self, parts: Sequence[IndexSet2]):
        self.parts = tuple(parts)

    def __contains__(self, pair):
        return any(pair in p for p in self.parts)

    def rectangles(self):
        out = []
        for p in self.parts:
            r = p.rectangles()
            if r is None:
                return None
            out.extend(r)
        return out

    def describe(self):
        return "union(" + ";".join(p.describe() for p in self.parts) + ")"


class Predicate2(IndexSet2):
    """A set of pairs given by a membership test and an optional fast counter."""

    def __init__(
        self,
        test: Callable[[int, int], bool],
        counter: Optional[Callable[[int, int], int]] = None,
        description: str = "predicate",
    ):
        self.test = test
        self.counter = counter
        self.description = description

    def __contains__(self, pair):
        i, j = pair
        return i >= 1 and j >= 1 and bool(self.test(i, j))

    def count(self, m, n):
        if self.counter is not None:
            return int(self.counter(m, n))
        return super().count(m, n)

    def describe(self):
        return self.description


# ---------------------------------------------------------------- estimates


@dataclass(frozen=True)
class DensityEstimate:
    """Prefix densities along a schedule and the verdict drawn from them.

    ``spread`` is the largest pairwise gap among the tail values (the last
    half of the schedule, rounded up); the verdict is PASS when it is within
    tolerance, in which case ``limit`` is the final value.
    """

    schedule: tuple
    counts: tuple
    values: tuple
    verdict: Verdict
    limit: Optional[Fraction]
    spread: Fraction
    tol: Fraction

    @property
    def final(self) -> Fraction:
        return self.values[-1]

    @property
    def tail(self) -> tuple:
        return self.values[-math.ceil(len(self.values) / 2) :]

    def tail_nondecreasing(self) -> bool:
        t = self.tail
        return all(a <= b for a, b in zip(t, t[1:]))


def _validate_schedule(schedule, minimum):
    points = [_check_index(s) for s in schedule]
    if len(points) < minimum:
        raise ValueError(f"schedule needs at least {minimum} entries, got {len(points)}")
    if points[0] < 1 or any(a >= b for a, b in zip(points, points[1:])):
        raise ValueError(f"schedule must be strictly increasing positive integers: {points}")
    return tuple(points)


def _estimate(schedule, counts, areas, tol):
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    values = tuple(Fraction(c, a) for c, a in zip(counts, areas))
    tail = values[-math.ceil(len(values) / 2) :]
    spread = max(tail) - min(tail)
    ok = spread <= tol
    return DensityEstimate(
        schedule=tuple(schedule),
        counts=tuple(counts),
        values=values,
        verdict=Verdict.PASS if ok else Verdict.INCONCLUSIVE,
        limit=values[-1] if ok else None,
        spread=spread,
        tol=tol,
    )


def default_schedule(horizon: int) -> tuple:
    """Four geometric prefix lengths ending at ``horizon``.

    For horizon 10**6 this is the default schedule (10**3, ..., 10**6).
    """
    horizon = _check_index(horizon)
    if horizon < 4:
        raise ValueError("horizon must be at least 4 to carry a schedule")
    points = sorted({max(1, horizon // 10**p) for p in (3, 2, 1, 0)})
    if len(points) < 4:
        points = sorted({max(1, horizon * i // 4) for i in (1, 2, 3, 4)})
    return tuple(points)


def prefix_density(index_set: IndexSet, n: int) -> Fraction:
    if n < 1:
        raise ValueError("prefix length must be >= 1")
    return Fraction(index_set.prefix_count(n), n)


def exact_density(index_set: IndexSet) -> Optional[Fraction]:
    """Closed-form natural density, or None when no closed form applies."""
    return index_set.exact_density()


def estimate_natural_density(index_set: IndexSet, schedule=DEFAULT_SCHEDULE, tol=DEFAULT_TOL) -> DensityEstimate:
    """Prefix densities along ``schedule`` with a PASS/INCONCLUSIVE verdict.

    PASS(v) means the tail of the schedule varies by at most ``tol`` and
    ends at v; it is evidence of a limit near v, not a proof of one.
    """
    schedule = _validate_schedule(schedule, 4)
    counts = [index_set.prefix_count(n) for n in schedule]
    return _estimate(schedule, counts, schedule, tol)


def prefix_density2(index_set: IndexSet2, m: int, n: int) -> Fraction:
    if m < 1 or n < 1:
        raise ValueError("rectangle sides must be >= 1")
    return Fraction(index_set.count(m, n), m * n)


def estimate_double_density(index_set: IndexSet2, grid=DEFAULT_GRID, tol=DEFAULT_TOL) -> DensityEstimate:
    """Like :func:`estimate_natural_density`, probing the squares N x N."""
    grid = _validate_schedule(grid, 2)
    counts = [index_set.count(n, n) for n in grid]
    return _estimate(grid, counts, [n * n for n in grid], tol)


# ---------------------------------------------------------------- text forms


def _split_top(text: str, sep: str) -> list[str]:
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
            if depth < 0:
                raise ValueError(f"unbalanced brackets in {text!r}")
        elif ch == sep and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    if depth:
        raise ValueError(f"unbalanced brackets in {text!r}")
    parts.append(text[start:])
    return parts


def parse_index_set(text: str) -> IndexSet:
    """Parse ``all``, ``squares``, ``arith:a,b``, ``finite:[...]``,
    ``complement(...)``, ``union(...;...)`` or ``intersection(...;...)``."""
    s = text.strip()
    if s == "all":
        return All()
    if s == "squares":
        return Squares()
    m = re.fullmatch(r"arith:\s*(\d+)\s*,\s*(\d+)", s)
    if m:
        return Arith(int(m.group(1)), int(m.group(2)))
    m = re.fullmatch(r"finite:\s*\[([\d,\s]*)\]", s)
    if m:
        body = m.group(1).strip()
        return Finite(int(x) for x in body.split(",") if x.strip()) if body else Finite()
    m = re.fullmatch(r"(complement|union|intersection)\s*\((.*)\)", s, flags=re.S)
    if m:
        word, body = m.groups()
        parts = [parse_index_set(p) for p in _split_top(body, ";")]
        if word == "complement":
            if len(parts) != 1:
                raise ValueError("complement takes exactly one set")
            return Complement(parts[0])
        return Union(parts) if word == "union" else Intersection(parts)
    raise ValueError(f"malformed index set {text!r}")
