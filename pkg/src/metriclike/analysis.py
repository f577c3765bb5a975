"""Convergence, boundedness, statistical convergence and statistical
Cauchyness of sequences in metric-like spaces, judged on finite evidence.

Every check scans up to a horizon and returns a three-valued verdict.  The
deviation of x_n from a candidate x_o is ``|delta(x_n, x_o) - delta(x_o, x_o)|``;
the violation set for a tolerance eps is ``{n : deviation >= eps}``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .arrays import RationalArray, ValueArray
from .density import (
    DEFAULT_GRID,
    DEFAULT_TOL,
    DensityEstimate,
    IndexSet,
    Predicate,
    Predicate2,
    default_schedule,
    estimate_double_density,
    estimate_natural_density,
)
from .points import PointValue, as_fraction, as_point
from .report import decimal12, exact_text, render_csv
from .seqspec import SequenceSpec, derived_block, eval_at, evaluate_block
from .verdict import Verdict

__all__ = [
    "DEFAULT_EPS",
    "DEFAULT_HORIZON",
    "FAIL_FACTOR",
    "AnalysisRequest",
    "EpsilonOutcome",
    "ConvergenceReport",
    "BoundedReport",
    "Theorem4Report",
    "check_convergence",
    "check_bounded",
    "stat_convergence_profile",
    "stat_limit_candidates",
    "stat_cauchy_profile",
    "suggest_cauchy_l",
    "theorem4_check",
    "violation_set",
    "cauchy_violation_set",
]

DEFAULT_EPS = (Fraction(1), Fraction(1, 2), Fraction(1, 4), Fraction(1, 8))
DEFAULT_HORIZON = 10**6
#: a violation density at or above FAIL_FACTOR * tol that is not falling counts as FAIL
FAIL_FACTOR = 10


@dataclass(frozen=True)
class AnalysisRequest:
    """Validated parameters shared by the analyses."""

    spec: SequenceSpec
    candidate: Optional[PointValue] = None
    eps_schedule: tuple = DEFAULT_EPS
    horizon: int = DEFAULT_HORIZON
    schedule: Optional[tuple] = None
    grid: tuple = DEFAULT_GRID
    tol: Fraction = DEFAULT_TOL

    def __post_init__(self):
        eps = tuple(as_fraction(e) for e in self.eps_schedule)
        if not eps or any(e <= 0 for e in eps) or any(a <= b for a, b in zip(eps, eps[1:])):
            raise ValueError(f"eps schedule must be positive and strictly decreasing: {eps}")
        horizon = int(self.horizon)
        if horizon < 1:
            raise ValueError("horizon must be positive")
        schedule = default_schedule(horizon) if self.schedule is None else tuple(int(s) for s in self.schedule)
        if schedule and max(schedule) > horizon:
            raise ValueError(f"schedule {schedule} runs past the horizon {horizon}")
        tol = as_fraction(self.tol)
        if tol <= 0:
            raise ValueError("tol must be positive")
        grid = tuple(int(g) for g in self.grid)
        if any(g < 1 for g in grid) or any(a >= b for a, b in zip(grid, grid[1:])):
            raise ValueError(f"grid must be strictly increasing positive sizes: {grid}")
        object.__setattr__(self, "eps_schedule", eps)
        object.__setattr__(self, "horizon", horizon)
        object.__setattr__(self, "schedule", schedule)
        object.__setattr__(self, "tol", tol)
        object.__setattr__(self, "grid", grid)
        if self.candidate is not None:
            object.__setattr__(self, "candidate", self.spec.space.check(as_point(self.candidate)))


@dataclass(frozen=True)
class EpsilonOutcome:
    epsilon: Fraction
    verdict: Verdict
    estimate: Optional[DensityEstimate] = None
    k_o: Optional[int] = None
    violation_count: Optional[int] = None
    first_violations: tuple = ()


@dataclass(frozen=True)
class ConvergenceReport:
    kind: str
    target: str
    outcomes: tuple
    verdict: Verdict
    horizon: int
    notes: tuple = ()

    def outcome(self, eps) -> EpsilonOutcome:
        eps = as_fraction(eps)
        for o in self.outcomes:
            if o.epsilon == eps:
                return o
        raise KeyError(eps)

    def rows(self) -> list[dict]:
        rows = []
        for o in self.outcomes:
            if o.estimate is not None:
                est = o.estimate
                areas = est.schedule if self.kind != "statistical-cauchy" else [n * n for n in est.schedule]
                for n, count, area in zip(est.schedule, est.counts, areas):
                    q = Fraction(count, area)
                    rows.append(_row(o.epsilon, n, count, q, o.verdict))
            else:
                q = Fraction(o.violation_count, self.horizon)
                rows.append(_row(o.epsilon, self.horizon, o.violation_count, q, o.verdict))
        return rows

    def to_csv(self, config=None) -> str:
        return render_csv(self.rows(), config)


def _row(eps, n, count, q, verdict):
    return {
        "epsilon": exact_text(eps),
        "schedule_n": n,
        "violation_count": count,
        "density": decimal12(q),
        "density_exact": exact_text(q),
        "verdict": str(verdict),
    }


def _combine(verdicts) -> Verdict:
    verdicts = list(verdicts)
    if any(v is Verdict.FAIL for v in verdicts):
        return Verdict.FAIL
    if all(v is Verdict.PASS for v in verdicts):
        return Verdict.PASS
    return Verdict.INCONCLUSIVE


def _density_verdict(est: DensityEstimate, tol: Fraction) -> Verdict:
    if est.verdict is Verdict.PASS and est.limit <= tol:
        return Verdict.PASS
    if est.final >= FAIL_FACTOR * tol and est.tail_nondecreasing():
        return Verdict.FAIL
    return Verdict.INCONCLUSIVE


def _deviations(spec: SequenceSpec, x_o: PointValue, horizon: int) -> RationalArray:
    """Signed delta(x_n, x_o) - delta(x_o, x_o) for n = 1..horizon (approximants)."""
    space = spec.space
    d = derived_block(spec, x_o, horizon)
    return (d - space.distance(x_o, x_o)).approx()


def _first(mask: np.ndarray, count: int = 5) -> tuple:
    return tuple(int(i) + 1 for i in np.flatnonzero(mask)[:count])


def check_convergence(
    spec: SequenceSpec,
    x_o,
    *,
    eps_schedule=DEFAULT_EPS,
    horizon: int = DEFAULT_HORIZON,
    within: Optional[IndexSet] = None,
) -> ConvergenceReport:
    """Usual convergence, certified up to ``horizon``.

    For each eps, k_o is the least index such that every n in [k_o, horizon]
    (restricted to ``within`` when given) lies in the eps-ball around x_o.
    An eps passes when k_o is at most half the horizon, so that the certified
    tail is at least as long as the transient.  Violations that recur in both
    (H/4, H/2] and (H/2, H], or one at H itself, are a FAIL; a lone late
    cluster is INCONCLUSIVE.
    """
    req = AnalysisRequest(spec, x_o, eps_schedule, horizon, schedule=())
    dev = _deviations(spec, req.candidate, req.horizon)
    restrict = within.mask(req.horizon) if within is not None else None
    outcomes = []
    for eps in req.eps_schedule:
        viol = dev.abs_ge(eps)
        if restrict is not None:
            viol &= restrict
        hits = np.flatnonzero(viol)
        if not len(hits):
            k_o = 1
        else:
            k_o = int(hits[-1]) + 2
        half, quarter = req.horizon // 2, req.horizon // 4
        if k_o <= half:
            verdict = Verdict.PASS
        elif k_o > req.horizon or viol[quarter:half].any():
            verdict, k_o = Verdict.FAIL, None
        else:
            verdict = Verdict.INCONCLUSIVE
        outcomes.append(
            EpsilonOutcome(eps, verdict, k_o=k_o, violation_count=len(hits), first_violations=_first(viol))
        )
    notes = ["horizon-certified"]
    if within is not None:
        notes.append(f"restricted to {within.describe()}")
    return ConvergenceReport(
        "convergence",
        str(req.candidate),
        tuple(outcomes),
        _combine(o.verdict for o in outcomes),
        req.horizon,
        tuple(notes),
    )


@dataclass(frozen=True)
class BoundedReport:
    """Result of a search for a pair with delta(x_m, x_n) > M."""

    bound: Fraction
    horizon: int
    witness: Optional[tuple]
    distance: Optional[PointValue]

    @property
    def bounded(self) -> bool:
        return self.witness is None

    @property
    def verdict(self) -> Verdict:
        # PASS: no witness up to the horizon
        return Verdict.PASS if self.bounded else Verdict.FAIL


def check_bounded(spec: SequenceSpec, bound, horizon: int) -> BoundedReport:
    """Search m, n <= horizon for delta(x_m, x_n) > bound.

    Rows are first scanned against one anchor per piece (the first index at
    which that piece fires), in increasing anchor order; the first hit is
    returned as (m, anchor).  Only if no anchor row has a witness is the full
    pair count consulted, and then a witness is located row by row.
    """
    bound = as_fraction(bound)
    if bound <= 0:
        raise ValueError("bound must be positive")
    horizon = int(horizon)
    space = spec.space
    block = evaluate_block(spec, horizon)
    values = block.values
    anchors = sorted(int(np.argmax(block.piece == p)) for p in np.unique(block.piece))
    for a in anchors:
        row = space.distances_to(values, values.point(a))
        hit = np.flatnonzero(row.approx().cmp_value(bound) > 0)
        if len(hit):
            m = int(hit[0])
            return BoundedReport(bound, horizon, (m + 1, a + 1), row.point(m))
    if space.count_pairs_outside(values, values, high=bound, strict_high=True) == 0:
        return BoundedReport(bound, horizon, None, None)
    for i in range(horizon):
        row = space.distance_row(values.point(i), values)
        hit = np.flatnonzero(row.approx().cmp_value(bound) > 0)
        if len(hit):
            j = int(hit[0])
            return BoundedReport(bound, horizon, (i + 1, j + 1), row.point(j))
    raise AssertionError("pair count and row scan disagree")


def _violation_outcomes(dev: RationalArray, req: AnalysisRequest, scalar_dev) -> list[EpsilonOutcome]:
    outcomes = []
    for eps in req.eps_schedule:
        mask = dev.abs_ge(eps)
        violation_set = Predicate(
            lambda n, eps=eps: abs(scalar_dev(n)) >= eps,
            mask=mask,
            description=f"A({exact_text(eps)})",
        )
        est = estimate_natural_density(violation_set, req.schedule, req.tol)
        outcomes.append(
            EpsilonOutcome(
                eps,
                _density_verdict(est, req.tol),
                estimate=est,
                violation_count=est.counts[-1],
                first_violations=_first(mask),
            )
        )
    return outcomes


def violation_set(spec: SequenceSpec, x_o, eps, horizon: int = 0) -> Predicate:
    """The set {n : |delta(x_n, x_o) - delta(x_o, x_o)| >= eps}, optionally
    with membership precomputed up to ``horizon``."""
    space = spec.space
    x_o = space.check(as_point(x_o))
    eps = as_fraction(eps)
    self_distance = space.distance(x_o, x_o)
    mask = _deviations(spec, x_o, horizon).abs_ge(eps) if horizon else None
    return Predicate(
        lambda n: abs(space.distance(eval_at(spec, n), x_o) - self_distance) >= eps,
        mask=mask,
        description=f"A({exact_text(eps)})",
    )


def stat_convergence_profile(
    spec: SequenceSpec,
    x_o,
    *,
    eps_schedule=DEFAULT_EPS,
    horizon: int = DEFAULT_HORIZON,
    schedule=None,
    tol=DEFAULT_TOL,
) -> ConvergenceReport:
    """Statistical convergence of x_n to x_o, judged along a density schedule.

    Each eps gets the density profile of its violation set.  An eps passes
    when the profile settles (spread within ``tol``) at a value <= ``tol``;
    it fails when the final density is at least ``FAIL_FACTOR * tol`` and the
    tail is not decreasing.  The overall verdict is PASS when every eps
    passes and FAIL when any eps fails.
    """
    req = AnalysisRequest(spec, x_o, eps_schedule, horizon, schedule, tol=tol)
    space = spec.space
    x_o = req.candidate
    self_distance = space.distance(x_o, x_o)
    dev = _deviations(spec, x_o, req.horizon)
    outcomes = _violation_outcomes(
        dev, req, lambda n: space.distance(eval_at(spec, n), x_o) - self_distance
    )
    return ConvergenceReport(
        "statistical",
        str(x_o),
        tuple(outcomes),
        _combine(o.verdict for o in outcomes),
        req.horizon,
        ("horizon-certified",),
    )


def stat_limit_candidates(spec: SequenceSpec, candidates: Sequence, **params) -> dict:
    """Run :func:`stat_convergence_profile` for each candidate.

    Returns an ordered mapping candidate -> report; several candidates may
    pass at once, since statistical limits need not be unique here.
    """
    out = {}
    for c in candidates:
        point = spec.space.check(as_point(c))
        out[point] = stat_convergence_profile(spec, point, **params)
    return out


def _pair_counter(spec: SequenceSpec, values: ValueArray, low, high):
    space = spec.space

    def count(m, n):
        if max(m, n) > len(values):
            block = evaluate_block(spec, max(m, n)).values
        else:
            block = values
        return space.count_pairs_outside(block.take(slice(0, m)), block.take(slice(0, n)), low=low, high=high)

    return count


def cauchy_violation_set(spec: SequenceSpec, l, eps, size: int = 1) -> Predicate2:
    """{(m, n) : |delta(x_m, x_n) - l| >= eps} with a combinatorial counter."""
    l = as_fraction(l)
    eps = as_fraction(eps)
    space = spec.space
    values = evaluate_block(spec, size).values
    return Predicate2(
        lambda m, n: abs(space.distance(eval_at(spec, m), eval_at(spec, n)) - l) >= eps,
        counter=_pair_counter(spec, values, l - eps, l + eps),
        description=f"A2({exact_text(eps)})",
    )


def stat_cauchy_profile(
    spec: SequenceSpec,
    l,
    *,
    eps_schedule=DEFAULT_EPS,
    grid=DEFAULT_GRID,
    tol=DEFAULT_TOL,
) -> ConvergenceReport:
    """Statistical Cauchyness with pair-limit ``l``, probed on N x N squares.

    The double density is estimated along the diagonal of the grid; the
    verdict rules are those of :func:`stat_convergence_profile`.
    """
    l = as_fraction(l)
    if l < 0:
        raise ValueError("l must be nonnegative")
    grid = tuple(int(g) for g in grid)
    req = AnalysisRequest(spec, None, eps_schedule, max(grid), schedule=(), grid=grid, tol=tol)
    outcomes = []
    for eps in req.eps_schedule:
        pairs = cauchy_violation_set(spec, l, eps, max(grid))
        est = estimate_double_density(pairs, req.grid, req.tol)
        outcomes.append(
            EpsilonOutcome(eps, _density_verdict(est, req.tol), estimate=est, violation_count=est.counts[-1])
        )
    return ConvergenceReport(
        "statistical-cauchy",
        f"l={exact_text(l)}",
        tuple(outcomes),
        _combine(o.verdict for o in outcomes),
        max(grid),
        ("horizon-certified", "diagonal grid m = n"),
    )


def suggest_cauchy_l(spec: SequenceSpec, size: int = 1000, tol=DEFAULT_TOL, sample: int = 200) -> list:
    """Candidate pair-limits l read off the dominant pair classes.

    Pairs are classified by which piece fires at each coordinate; a class is
    dominant when it covers more than half of the size x size square.  From
    each dominant class the distances on the trailing ``sample`` indices of
    each coordinate are collected.  A class with a single distance value
    contributes that value exactly; otherwise its values are bucketed on a
    grid of width ``tol`` and the lower edge of the fullest bucket is taken.
    """
    tol = as_fraction(tol)
    space = spec.space
    block = evaluate_block(spec, size)
    pieces, sizes = np.unique(block.piece, return_counts=True)
    found = []
    for p, cp in zip(pieces, sizes):
        for q, cq in zip(pieces, sizes):
            if Fraction(int(cp) * int(cq), size * size) <= Fraction(1, 2):
                continue
            rows = np.flatnonzero(block.piece == p)[-sample:]
            cols = block.values.take(np.flatnonzero(block.piece == q)[-sample:])
            values = set()
            for i in rows:
                values.update(space.distance_row(block.values.point(int(i)), cols).points())
            if len(values) == 1:
                found.append(values.pop())
                continue
            buckets = Counter(math.floor(v.approx / tol) for v in values)
            top = max(buckets.values())
            lowest = min(b for b, c in buckets.items() if c == top)
            found.append(PointValue(lowest * tol))
    out = []
    for v in found:
        if v not in out:
            out.append(v)
    return sorted(out, key=lambda v: v.approx)


@dataclass(frozen=True)
class Theorem4Report:
    """Statistical convergence of delta(x_n, y) to delta(x_o, y) for each y."""

    x_o: PointValue
    self_distance: PointValue
    verdict: Verdict
    hypothesis: Optional[str] = None
    base: Optional[ConvergenceReport] = None
    per_y: dict = field(default_factory=dict)
    bound_violations: dict = field(default_factory=dict)

    def rows(self) -> list[dict]:
        rows = []
        for y, rep in self.per_y.items():
            for row in rep.rows():
                rows.append(dict(row, y=str(y)))
        return rows


def theorem4_check(
    spec: SequenceSpec,
    x_o,
    ys: Sequence,
    *,
    eps_schedule=DEFAULT_EPS,
    horizon: int = DEFAULT_HORIZON,
    schedule=None,
    tol=DEFAULT_TOL,
) -> Theorem4Report:
    """Check that delta(x_n, y) converges statistically to delta(x_o, y).

    Requires delta(x_o, x_o) = 0 (checked exactly) and a passing statistical
    profile for x_o; otherwise the report is NOT_APPLICABLE and names the
    failed hypothesis.  Along the way the pointwise bound
    ``|delta(x_n, y) - delta(x_o, y)| <= delta(x_n, x_o)`` is checked at every
    n up to the horizon; any breach is a FAIL.
    """
    space = spec.space
    x_o = space.check(as_point(x_o))
    s = space.distance(x_o, x_o)
    if s:
        return Theorem4Report(
            x_o, s, Verdict.NOT_APPLICABLE, hypothesis=f"self-distance delta(x_o, x_o) = {s} is not 0"
        )
    params = dict(eps_schedule=eps_schedule, horizon=horizon, schedule=schedule, tol=tol)
    base = stat_convergence_profile(spec, x_o, **params)
    if base.verdict is not Verdict.PASS:
        return Theorem4Report(
            x_o,
            s,
            Verdict.NOT_APPLICABLE,
            hypothesis=f"x_n is not statistically convergent to {x_o} ({base.verdict})",
            base=base,
        )
    req = AnalysisRequest(spec, x_o, eps_schedule, horizon, schedule, tol=tol)
    to_xo = derived_block(spec, x_o, req.horizon).approx()
    per_y, breaches = {}, {}
    for y in ys:
        y = space.check(as_point(y))
        target = space.distance(x_o, y)
        dev = (derived_block(spec, y, req.horizon) - target).approx()
        # |dev| <= delta(x_n, x_o), cross-multiplied
        bound_ok = np.abs(dev.num) * to_xo.den <= to_xo.num * dev.den
        breaches[y] = int((~bound_ok.astype(bool)).sum())
        outcomes = _violation_outcomes(
            dev, req, lambda n, y=y, target=target: space.distance(eval_at(spec, n), y) - target
        )
        per_y[y] = ConvergenceReport(
            "derived",
            f"delta(x_n, {y}) -> {target}",
            tuple(outcomes),
            _combine(o.verdict for o in outcomes),
            req.horizon,
            ("horizon-certified",),
        )
    verdict = _combine(r.verdict for r in per_y.values())
    if any(breaches.values()):
        verdict = Verdict.FAIL
    return Theorem4Report(x_o, s, verdict, base=base, per_y=per_y, bound_violations=breaches)
