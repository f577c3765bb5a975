"""Brute-force reference computations, written without the library."""

from fractions import Fraction
from math import isqrt


def ex3_term(n: int) -> int:
    k = isqrt(n)
    return k if k * k == n else 2


def ex3_violations(x_o: int, eps: Fraction, horizon: int) -> int:
    """Count n <= horizon with |d(x_n, x_o) - d(x_o, x_o)| >= eps in the sum space."""
    total = 0
    for n in range(1, horizon + 1):
        x = ex3_term(n)
        d = 0 if x == x_o else x + x_o
        if d >= eps:
            total += 1
    return total


def ex4_term(n: int) -> Fraction:
    k = isqrt(n)
    return Fraction(k) if k * k == n else Fraction(1, n)


def ex4_cauchy_pairs_brute(size: int) -> int:
    """Pairs (m, n) in [1, size]^2 with x_m + x_n >= 1/2 (all terms rational, so the
    irrational-sum distance is always the sum)."""
    is_square = [False] * (size + 1)
    for k in range(1, isqrt(size) + 1):
        is_square[k * k] = True
    total = 0
    for m in range(1, size + 1):
        for n in range(1, size + 1):
            if is_square[m] or is_square[n]:
                total += 1
            elif 2 * (m + n) >= m * n:  # 1/m + 1/n >= 1/2
                total += 1
    return total


def ex4_cauchy_pairs_closed_form(size: int) -> int:
    """Square-involved pairs, plus row and column 2, plus (3,3), (3,5), (5,3), (3,6), (6,3)."""
    s = isqrt(size)
    rest = size - s
    return size * size - rest * rest + (2 * rest - 1) + 5


def eq4_holds(members, v: int, j: int, horizon: int) -> bool:
    """|members n [1, n]| / n > (j - 1) / j for every n in [v, horizon], by a running count."""
    count = sum(1 for m in range(1, v) if m in members)
    for n in range(v, horizon + 1):
        if n in members:
            count += 1
        if count * j <= (j - 1) * n:
            return False
    return True
