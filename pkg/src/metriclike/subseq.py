"""Density-one subsequences: building one from a statistically convergent
sequence, and checking the converse implication.

Given x_o, level j collects the indices whose deviation is below 1/j::

    P_j = {n : |delta(x_n, x_o) - delta(x_o, x_o)| < 1/j}

Thresholds v_1 < v_2 < ... are chosen so that P_j fills more than
(j - 1)/j of every prefix from v_j on, and the index set is

    K = [1, v_1]  u  U_j ([v_j, v_{j+1}] n P_j)

with the last level running to the horizon.  Everything "for all n >= v_j"
is checked on [v_j, horizon] only; plans are horizon-certified.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .analysis import (
    DEFAULT_EPS,
    DEFAULT_HORIZON,
    ConvergenceReport,
    _deviations,
    check_convergence,
    stat_convergence_profile,
)
from .density import (
    DEFAULT_TOL,
    DensityEstimate,
    Finite,
    IndexSet,
    Predicate,
    default_schedule,
    estimate_natural_density,
)
from .points import PointValue, as_fraction, as_point, parse_point
from .seqspec import SequenceSpec, eval_at
from .verdict import Verdict

__all__ = [
    "DEFAULT_JMAX",
    "ThresholdNotFound",
    "Level",
    "SubsequencePlan",
    "PlanCheck",
    "ImplicationReport",
    "build_levels",
    "find_thresholds",
    "assemble_k",
    "extract_plan",
    "verify_plan",
    "stat_from_subsequence",
    "plan_from_text",
]

DEFAULT_JMAX = 5


class ThresholdNotFound(ValueError):
    """No admissible v_j exists up to the horizon."""

    def __init__(self, j: int, horizon: int, last_violation: Optional[int]):
        self.j = j
        self.horizon = horizon
        self.last_violation = last_violation
        if last_violation is None:
            detail = "P_j has no element after the previous threshold"
        else:
            detail = f"the prefix ratio bound fails as late as n = {last_violation}"
        super().__init__(f"no threshold v_{j} <= {horizon}: {detail}")


def _level_description(j: int) -> str:
    return f"{{n : |delta(x_n,x_o) - delta(x_o,x_o)| < 1/{j}}}"


def build_levels(spec: SequenceSpec, x_o, j_max: int = DEFAULT_JMAX, horizon: int = DEFAULT_HORIZON) -> list:
    """P_1, ..., P_{j_max} as predicate sets with membership cached to ``horizon``."""
    if j_max < 1:
        raise ValueError("j_max must be >= 1")
    space = spec.space
    x_o = space.check(as_point(x_o))
    self_distance = space.distance(x_o, x_o)
    dev = _deviations(spec, x_o, horizon)
    levels = []
    for j in range(1, j_max + 1):
        bound = Fraction(1, j)
        mask = ~dev.abs_ge(bound)
        levels.append(
            Predicate(
                lambda n, bound=bound: abs(space.distance(eval_at(spec, n), x_o) - self_distance) < bound,
                mask=mask,
                description=f"P_{j} = {_level_description(j)}",
            )
        )
    for outer, inner in zip(levels, levels[1:]):
        a, b = outer.mask(horizon), inner.mask(horizon)
        if (b & ~a).any():
            raise AssertionError("levels are not nested")
    return levels


@dataclass(frozen=True)
class Level:
    j: int
    members: IndexSet
    threshold: int


@dataclass(frozen=True)
class SubsequencePlan:
    levels: tuple
    K: IndexSet
    horizon: int
    center: Optional[PointValue] = None

    @property
    def thresholds(self) -> tuple:
        return tuple(level.threshold for level in self.levels)

    def to_text(self) -> str:
        lines = ["# density-one subsequence plan", f"horizon {self.horizon}"]
        if self.center is not None:
            lines.append(f"center {_point_text(self.center)}")
        for level in self.levels:
            lines.append(f"level {level.j} v={level.threshold} P={_level_description(level.j)}")
        lines.append("K = [1, v_1] u U_j ([v_j, v_{j+1}] n P_j), last level to the horizon")
        return "\n".join(lines) + "\n"


def _point_text(p: PointValue) -> str:
    try:
        return p.literal()
    except ValueError:
        return str(p)


def assemble_k(levels: Sequence[IndexSet], thresholds: Sequence[int], horizon: int) -> Predicate:
    """K from levels and thresholds; past the horizon K follows the last level."""
    if not levels or len(levels) != len(thresholds):
        raise ValueError("need one threshold per level")
    v = [int(t) for t in thresholds]
    mask = np.zeros(horizon, dtype=bool)
    mask[: min(v[0], horizon)] = True
    for j, level in enumerate(levels):
        start = v[j]
        stop = v[j + 1] if j + 1 < len(v) else horizon + 1
        if start > horizon:
            break
        segment = level.mask(horizon)[start - 1 : min(stop, horizon + 1) - 1]
        mask[start - 1 : start - 1 + len(segment)] |= segment

    last = levels[-1]

    def member(n):
        if n <= v[0]:
            return True
        for j in range(len(v) - 1, -1, -1):
            if n >= v[j]:
                return n in levels[j]
        return False

    return Predicate(member, mask=mask, description="K")


def find_thresholds(levels: Sequence[Predicate], horizon: int, center=None) -> SubsequencePlan:
    """Pick the least admissible v_1 < v_2 < ... and assemble K.

    v_j is the least element of P_j above v_{j-1} such that
    ``|P_j n [1, n]| / n > (j - 1)/j`` for every n in [v_j, horizon].
    """
    n = np.arange(1, horizon + 1, dtype=np.int64)
    previous = 0
    chosen = []
    for j, level in enumerate(levels, start=1):
        mask = level.mask(horizon)
        counts = np.cumsum(mask, dtype=np.int64)
        ok = counts * j > (j - 1) * n
        bad = np.flatnonzero(~ok)
        last_bad = int(bad[-1]) + 1 if len(bad) else 0
        lower = max(previous, last_bad)
        after = np.flatnonzero(mask[lower:])
        if not len(after):
            raise ThresholdNotFound(j, horizon, last_bad or None)
        v = lower + int(after[0]) + 1
        chosen.append(Level(j, level, v))
        previous = v
    K = assemble_k([lv.members for lv in chosen], [lv.threshold for lv in chosen], horizon)
    return SubsequencePlan(tuple(chosen), K, horizon, None if center is None else as_point(center))


def extract_plan(spec: SequenceSpec, x_o, j_max: int = DEFAULT_JMAX, horizon: int = DEFAULT_HORIZON) -> SubsequencePlan:
    levels = build_levels(spec, x_o, j_max, horizon)
    return find_thresholds(levels, horizon, center=x_o)


def _threshold_problems(plan: SubsequencePlan) -> list:
    problems = []
    n = np.arange(1, plan.horizon + 1, dtype=np.int64)
    previous = 0
    for level in plan.levels:
        v, j = level.threshold, level.j
        if v <= previous:
            problems.append(f"v_{j} = {v} does not exceed v_{j - 1} = {previous}")
        previous = v
        if not 1 <= v <= plan.horizon or v not in level.members:
            problems.append(f"v_{j} = {v} is not in P_{j}")
            continue
        counts = np.cumsum(level.members.mask(plan.horizon), dtype=np.int64)
        bad = np.flatnonzero((counts * j <= (j - 1) * n)[v - 1 :])
        if len(bad):
            problems.append(f"prefix ratio bound for level {j} fails at n = {v + int(bad[0])}")
    return problems


@dataclass(frozen=True)
class PlanCheck:
    verdict: Verdict
    density: DensityEstimate
    violations: int
    witness: Optional[tuple] = None
    reasons: tuple = ()


def verify_plan(
    plan: SubsequencePlan,
    spec: SequenceSpec,
    x_o=None,
    schedule=None,
    tol=DEFAULT_TOL,
) -> PlanCheck:
    """Check that K has density near 1 and that x_n stays close along K.

    (a) the density estimate of K must PASS with a value >= 1 - tol;
    (b) for each level l, every n in K with v_l <= n <= horizon must have
    deviation < 1/l.  The first breach of (b) is returned as (l, n).
    The stored thresholds are re-checked too: strictly increasing, v_j in
    P_j, and the prefix ratio bound on [v_j, horizon].
    """
    x_o = plan.center if x_o is None else as_point(x_o)
    if x_o is None:
        raise ValueError("plan has no center; pass x_o")
    tol = as_fraction(tol)
    horizon = plan.horizon
    schedule = default_schedule(horizon) if schedule is None else schedule
    est = estimate_natural_density(plan.K, schedule, tol)
    reasons = []
    verdict = Verdict.PASS
    if est.verdict is not Verdict.PASS:
        verdict = Verdict.INCONCLUSIVE
        reasons.append("density of K did not settle")
    elif est.limit < 1 - tol:
        verdict = Verdict.FAIL
        reasons.append(f"density of K is {float(est.limit):.6g} < 1 - tol")

    problems = _threshold_problems(plan)
    if problems:
        verdict = Verdict.FAIL
        reasons.extend(problems)

    dev = _deviations(spec, spec.space.check(x_o), horizon)
    in_k = plan.K.mask(horizon)
    violations, witness = 0, None
    for level in plan.levels:
        tail = np.zeros(horizon, dtype=bool)
        tail[level.threshold - 1 :] = True
        bad = dev.abs_ge(Fraction(1, level.j)) & in_k & tail
        count = int(bad.sum())
        if count and witness is None:
            witness = (level.j, int(np.flatnonzero(bad)[0]) + 1)
        violations += count
    if violations:
        verdict = Verdict.FAIL
        reasons.append(f"{violations} indices of K exceed their level bound")
    return PlanCheck(verdict, est, violations, witness, tuple(reasons))


@dataclass(frozen=True)
class ImplicationReport:
    """Desk-scale check of: density-one convergent subsequence => statistical limit."""

    verdict: Verdict
    density: DensityEstimate
    convergence: ConvergenceReport
    statistical: Optional[ConvergenceReport] = None
    note: str = ""


def stat_from_subsequence(
    K: IndexSet,
    spec: SequenceSpec,
    x_o,
    *,
    eps_schedule=DEFAULT_EPS,
    horizon: int = DEFAULT_HORIZON,
    schedule=None,
    tol=DEFAULT_TOL,
) -> ImplicationReport:
    """If x_n converges to x_o along K and K has density near 1, the sequence
    must converge statistically to x_o.

    PASS: both premises hold and so does the conclusion.  NOT_APPLICABLE: a
    premise fails.  FAIL: premises hold but the statistical profile fails.
    """
    if isinstance(K, Finite) or K.prefix_count(horizon) == K.prefix_count(horizon // 2):
        raise ValueError("K is finite up to the horizon")
    tol = as_fraction(tol)
    schedule = default_schedule(horizon) if schedule is None else schedule
    density = estimate_natural_density(K, schedule, tol)
    convergence = check_convergence(spec, x_o, eps_schedule=eps_schedule, horizon=horizon, within=K)
    if density.verdict is not Verdict.PASS or density.limit < 1 - tol:
        return ImplicationReport(Verdict.NOT_APPLICABLE, density, convergence, note="K does not have density near 1")
    if convergence.verdict is Verdict.FAIL:
        return ImplicationReport(Verdict.NOT_APPLICABLE, density, convergence, note="x_n does not converge along K")
    if convergence.verdict is not Verdict.PASS:
        return ImplicationReport(Verdict.INCONCLUSIVE, density, convergence, note="convergence along K is inconclusive")
    statistical = stat_convergence_profile(
        spec, x_o, eps_schedule=eps_schedule, horizon=horizon, schedule=schedule, tol=tol
    )
    note = {
        Verdict.PASS: "implication holds",
        Verdict.FAIL: "premises hold but the statistical profile fails",
    }.get(statistical.verdict, "statistical profile inconclusive")
    return ImplicationReport(statistical.verdict, density, convergence, statistical, note)


_LEVEL_RE = re.compile(r"level\s+(\d+)\s+v=(\d+)\b")


def plan_from_text(text: str, spec: SequenceSpec, x_o=None) -> SubsequencePlan:
    """Rebuild a plan from :meth:`SubsequencePlan.to_text` output.

    Levels are recomputed from ``spec`` and the center; the thresholds are
    taken as written, so a tampered plan is caught by :func:`verify_plan`.
    """
    horizon = None
    center = None if x_o is None else as_point(x_o)
    thresholds = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("horizon "):
            horizon = int(line.split()[1])
        elif line.startswith("center ") and center is None:
            center = parse_point(line.split(None, 1)[1])
        elif line.startswith("level "):
            m = _LEVEL_RE.match(line)
            if not m:
                raise ValueError(f"malformed level line {raw!r}")
            thresholds[int(m.group(1))] = int(m.group(2))
    if horizon is None or center is None or not thresholds:
        raise ValueError("plan text needs horizon, center and at least one level")
    j_max = max(thresholds)
    if sorted(thresholds) != list(range(1, j_max + 1)):
        raise ValueError("plan levels must be numbered 1..j_max")
    levels = build_levels(spec, center, j_max, horizon)
    chosen = tuple(Level(j, levels[j - 1], thresholds[j]) for j in range(1, j_max + 1))
    K = assemble_k(levels, [thresholds[j] for j in range(1, j_max + 1)], horizon)
    return SubsequencePlan(chosen, K, horizon, center)
