"""Deterministic CSV rendering for analysis reports."""

from __future__ import annotations

import csv
import io
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from typing import Iterable, Mapping, Optional

__all__ = ["CSV_COLUMNS", "decimal12", "exact_text", "render_csv"]

CSV_COLUMNS = ("epsilon", "schedule_n", "violation_count", "density", "density_exact", "verdict")

_QUANTUM = Decimal(1).scaleb(-12)


def decimal12(q) -> str:
    """Render an exact rational with 12 decimal places, rounding half to even."""
    q = Fraction(q)
    with localcontext() as ctx:
        ctx.prec = max(50, len(str(abs(q.numerator) // q.denominator)) + 20)
        value = Decimal(q.numerator) / Decimal(q.denominator)
        return format(value.quantize(_QUANTUM, rounding=ROUND_HALF_EVEN), "f")


def exact_text(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def render_csv(rows: Iterable[Mapping], config: Optional[Mapping] = None, columns=CSV_COLUMNS) -> str:
    """CSV text with the run configuration as leading ``#`` comment lines."""
    buf = io.StringIO()
    for key, value in (config or {}).items():
        buf.write(f"# {key}: {value}\n")
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()
