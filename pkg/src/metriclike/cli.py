"""Command-line front end.

Every subcommand prints one verdict line, optionally writes a CSV report
headed by its run configuration, and exits with 0 (pass), 1 (fail),
2 (inconclusive or not applicable) or 3 (bad input).
"""

from __future__ import annotations

import argparse
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import __version__
from .analysis import (
    DEFAULT_EPS,
    DEFAULT_HORIZON,
    check_bounded,
    stat_cauchy_profile,
    stat_limit_candidates,
    suggest_cauchy_l,
    theorem4_check,
)
from .density import DEFAULT_GRID, DEFAULT_TOL, default_schedule, estimate_natural_density, parse_index_set
from .points import PointValue, parse_point
from .report import CSV_COLUMNS, decimal12, exact_text, render_csv
from .seqspec import SpecError, SequenceSpec, builtin_spec, parse_spec
from .spaces import CarrierError, builtin_space, check_axioms
from .subseq import (
    DEFAULT_JMAX,
    ThresholdNotFound,
    extract_plan,
    plan_from_text,
    stat_from_subsequence,
    verify_plan,
)
from .verdict import Verdict

__all__ = ["RunConfig", "InputError", "build_parser", "run", "main"]

EXIT_INPUT_ERROR = 3


class InputError(Exception):
    """Bad flags, unreadable files or malformed documents."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


@dataclass
class RunConfig:
    """Everything needed to replay a run; embedded in every report."""

    command: str
    source: Optional[str] = None
    candidates: tuple = ()
    eps: tuple = DEFAULT_EPS
    horizon: int = DEFAULT_HORIZON
    grid: tuple = DEFAULT_GRID
    tol: Fraction = DEFAULT_TOL
    out: Optional[str] = None
    extra: dict = field(default_factory=dict)

    def as_header(self) -> dict:
        head = {"command": self.command}
        if self.source is not None:
            head["source"] = self.source
        if self.candidates:
            head["candidates"] = " ".join(_point_text(c) for c in self.candidates)
        head["eps"] = ",".join(exact_text(e) for e in self.eps)
        head["horizon"] = self.horizon
        head["grid"] = ",".join(str(g) for g in self.grid)
        head["tol"] = exact_text(self.tol)
        for key, value in self.extra.items():
            head[key] = value
        return head


def _point_text(p: PointValue) -> str:
    try:
        return p.literal()
    except ValueError:
        return str(p)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _positive_fraction(text: str) -> Fraction:
    q = _fraction(text)
    if q <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return q


def _positive_int(text: str) -> int:
    q = _fraction(text.replace("_", ""))
    if q.denominator != 1 or q <= 0:
        raise argparse.ArgumentTypeError(f"must be a positive integer: {text!r}")
    return int(q)


def _fraction_list(text: str) -> tuple:
    return tuple(_positive_fraction(t) for t in text.split(",") if t.strip())


def _int_list(text: str) -> tuple:
    return tuple(_positive_int(t) for t in text.split(",") if t.strip())


def _point(text: str) -> PointValue:
    try:
        return parse_point(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="metriclike", description="Statistical convergence checks in metric-like spaces.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, *, spec=True, eps=True, horizon=True, tol=True):
        if spec:
            src = p.add_mutually_exclusive_group(required=True)
            src.add_argument("--spec", metavar="PATH", help="sequence document")
            src.add_argument("--builtin", metavar="NAME", help="example-3 or example-4")
        if eps:
            p.add_argument("--eps", type=_fraction_list, default=DEFAULT_EPS, metavar="LIST")
        if horizon:
            p.add_argument("--horizon", type=_positive_int, default=DEFAULT_HORIZON, metavar="N")
        if tol:
            p.add_argument("--tol", type=_positive_fraction, default=DEFAULT_TOL, metavar="X")
        p.add_argument("--out", metavar="PATH", help="write the CSV report here")

    p = sub.add_parser("axioms", help="check the axioms on a finite sample")
    p.add_argument("--space", default="sum")
    p.add_argument("--point", type=_point, action="append", default=[], metavar="POINT")
    p.add_argument("--random", type=_positive_int, default=0, metavar="N", help="add N random points")
    p.add_argument("--seed", type=int, default=0)
    common(p, spec=False, eps=False, horizon=False, tol=False)

    p = sub.add_parser("density", help="estimate the natural density of an index set")
    p.add_argument("--set", dest="index_set", required=True, metavar="SET")
    common(p, spec=False, eps=False)

    p = sub.add_parser("stat-limit", help="statistical convergence to each candidate")
    p.add_argument("--candidate", type=_point, action="append", required=True, metavar="POINT")
    common(p)

    p = sub.add_parser("stat-cauchy", help="statistical Cauchyness with pair-limit l")
    p.add_argument("--l", dest="l", type=_fraction, default=None, metavar="X")
    p.add_argument("--grid", type=_int_list, default=DEFAULT_GRID, metavar="LIST")
    common(p, horizon=False)

    p = sub.add_parser("bounded", help="search for a pair farther apart than M")
    p.add_argument("--bound", type=_positive_fraction, required=True, metavar="M")
    common(p, eps=False, tol=False)

    p = sub.add_parser("extract-k", help="build a density-one index set K")
    p.add_argument("--candidate", type=_point, required=True, metavar="POINT")
    p.add_argument("--jmax", type=_positive_int, default=DEFAULT_JMAX, metavar="N")
    p.add_argument("--plan", metavar="PATH", help="write the plan text here")
    common(p, eps=False)

    p = sub.add_parser("verify-k", help="replay a plan, or test a given K")
    p.add_argument("--candidate", type=_point, default=None, metavar="POINT")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--plan", metavar="PATH")
    group.add_argument("--set", dest="index_set", metavar="SET")
    common(p)

    p = sub.add_parser("theorem4", help="statistical convergence of delta(x_n, y)")
    p.add_argument("--candidate", type=_point, required=True, metavar="POINT")
    p.add_argument("--y", type=_point, action="append", required=True, metavar="POINT")
    common(p)
    return parser


def _load_spec(args) -> tuple[SequenceSpec, str]:
    if args.builtin is not None:
        try:
            return builtin_spec(args.builtin), args.builtin
        except (KeyError, ValueError):
            raise InputError(f"unknown builtin {args.builtin!r}") from None
    try:
        text = Path(args.spec).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {args.spec}: {exc.strerror}") from None
    try:
        return parse_spec(text), args.spec
    except SpecError as exc:
        raise InputError(f"{args.spec}: {exc}") from None


def _write(path: Optional[str], text: str) -> None:
    if path is None:
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from None


def _config(args, **kw) -> RunConfig:
    return RunConfig(
        command=args.command,
        eps=getattr(args, "eps", DEFAULT_EPS),
        horizon=getattr(args, "horizon", DEFAULT_HORIZON),
        grid=getattr(args, "grid", DEFAULT_GRID),
        tol=getattr(args, "tol", DEFAULT_TOL),
        out=args.out,
        **kw,
    )


def _cmd_axioms(args, out):
    space = builtin_space(args.space)
    sample = list(args.point)
    rng = random.Random(args.seed)
    positive = space.name != "sum"
    for _ in range(args.random):
        q = Fraction(rng.randint(1 if positive else 0, 40), rng.randint(1, 12))
        sample.append(parse_point(str(q)))
    if not sample:
        raise InputError("axioms needs --point or --random")
    report = check_axioms(space, sample)
    config = _config(args, candidates=tuple(sample), extra={"space": space.name, "seed": args.seed})
    rows = [
        {
            "axiom": r.axiom,
            "passed": r.passed,
            "checked": r.checked,
            "witness": "" if r.witness is None else " ".join(str(p) for p in r.witness),
        }
        for r in report.results
    ]
    _write(args.out, render_csv(rows, config.as_header(), ("axiom", "passed", "checked", "witness")))
    verdict = Verdict.PASS if report.passed else Verdict.FAIL
    failed = [r.axiom for r in report.results if not r.passed]
    detail = f"{len(sample)} points" + (f"; broken: {', '.join(failed)}" if failed else "")
    return verdict, detail


def _cmd_density(args, out):
    index_set = parse_index_set(args.index_set)
    est = estimate_natural_density(index_set, default_schedule(args.horizon), args.tol)
    config = _config(args, extra={"set": index_set.describe()})
    rows = [
        {"schedule_n": n, "count": c, "density": decimal12(v), "density_exact": exact_text(v), "verdict": est.verdict}
        for n, c, v in zip(est.schedule, est.counts, est.values)
    ]
    _write(args.out, render_csv(rows, config.as_header(), ("schedule_n", "count", "density", "density_exact", "verdict")))
    exact = index_set.exact_density()
    detail = f"final density {decimal12(est.final)}"
    if exact is not None:
        detail += f"; exact density {exact}"
    return est.verdict, detail


def _cmd_stat_limit(args, out):
    spec, source = _load_spec(args)
    reports = stat_limit_candidates(
        spec, args.candidate, eps_schedule=args.eps, horizon=args.horizon, tol=args.tol
    )
    config = _config(args, source=source, candidates=tuple(args.candidate))
    rows = []
    for c, rep in reports.items():
        rows.extend(dict(r, candidate=_point_text(c)) for r in rep.rows())
    _write(args.out, render_csv(rows, config.as_header(), ("candidate",) + CSV_COLUMNS))
    verdicts = [rep.verdict for rep in reports.values()]
    if Verdict.PASS in verdicts:
        verdict = Verdict.PASS
    elif all(v is Verdict.FAIL for v in verdicts):
        verdict = Verdict.FAIL
    else:
        verdict = Verdict.INCONCLUSIVE
    detail = "; ".join(f"{c}: {rep.verdict}" for c, rep in reports.items())
    return verdict, detail


def _cmd_stat_cauchy(args, out):
    spec, source = _load_spec(args)
    l = args.l
    extra = {}
    if l is None:
        suggestions = suggest_cauchy_l(spec, tol=args.tol)
        if not suggestions:
            raise InputError("no dominant pair distance; pass --l")
        l = suggestions[0].approx
        extra["l_suggested"] = "yes"
    rep = stat_cauchy_profile(spec, l, eps_schedule=args.eps, grid=args.grid, tol=args.tol)
    extra["l"] = exact_text(l)
    config = _config(args, source=source, extra=extra)
    _write(args.out, rep.to_csv(config.as_header()))
    finals = ", ".join(f"eps {o.epsilon}: {decimal12(o.estimate.final)}" for o in rep.outcomes)
    return rep.verdict, f"l = {l}; {finals}"


def _cmd_bounded(args, out):
    spec, source = _load_spec(args)
    rep = check_bounded(spec, args.bound, args.horizon)
    config = _config(args, source=source, extra={"bound": exact_text(args.bound)})
    row = {
        "bound": exact_text(args.bound),
        "m": "" if rep.witness is None else rep.witness[0],
        "n": "" if rep.witness is None else rep.witness[1],
        "distance": "" if rep.distance is None else str(rep.distance),
    }
    _write(args.out, render_csv([row], config.as_header(), ("bound", "m", "n", "distance")))
    if rep.witness is None:
        return rep.verdict, f"no pair exceeds {args.bound} up to {args.horizon}"
    m, n = rep.witness
    return rep.verdict, f"delta(x_{m}, x_{n}) = {rep.distance} > {args.bound}"


def _plan_rows(plan, check):
    return [
        {"level": lv.j, "threshold": lv.threshold, "members": lv.members.describe(), "verdict": check.verdict}
        for lv in plan.levels
    ]


_PLAN_COLUMNS = ("level", "threshold", "members", "verdict")


def _cmd_extract_k(args, out):
    spec, source = _load_spec(args)
    config = _config(args, source=source, candidates=(args.candidate,), extra={"jmax": args.jmax})
    try:
        plan = extract_plan(spec, args.candidate, args.jmax, args.horizon)
    except ThresholdNotFound as exc:
        _write(args.out, render_csv([], config.as_header(), _PLAN_COLUMNS))
        return Verdict.FAIL, str(exc)
    check = verify_plan(plan, spec, tol=args.tol)
    _write(args.plan, plan.to_text())
    _write(args.out, render_csv(_plan_rows(plan, check), config.as_header(), _PLAN_COLUMNS))
    detail = f"v = {list(plan.thresholds)}; density of K {decimal12(check.density.final)}"
    if check.witness:
        detail += f"; first breach at level {check.witness[0]}, n = {check.witness[1]}"
    return check.verdict, detail


def _cmd_verify_k(args, out):
    spec, source = _load_spec(args)
    if args.plan is not None:
        try:
            text = Path(args.plan).read_text()
        except OSError as exc:
            raise InputError(f"cannot read {args.plan}: {exc.strerror}") from None
        plan = plan_from_text(text, spec, args.candidate)
        check = verify_plan(plan, spec, schedule=default_schedule(plan.horizon), tol=args.tol)
        config = _config(args, source=source, candidates=(plan.center,), extra={"plan": args.plan})
        _write(args.out, render_csv(_plan_rows(plan, check), config.as_header(), _PLAN_COLUMNS))
        detail = f"density of K {decimal12(check.density.final)}; {check.violations} level breaches"
        return check.verdict, detail
    if args.candidate is None:
        raise InputError("verify-k --set needs --candidate")
    K = parse_index_set(args.index_set)
    rep = stat_from_subsequence(
        K, spec, args.candidate, eps_schedule=args.eps, horizon=args.horizon, tol=args.tol
    )
    config = _config(args, source=source, candidates=(args.candidate,), extra={"set": K.describe()})
    rows = rep.statistical.rows() if rep.statistical is not None else []
    _write(args.out, render_csv(rows, config.as_header()))
    return rep.verdict, f"{rep.note}; density of K {decimal12(rep.density.final)}"


def _cmd_theorem4(args, out):
    spec, source = _load_spec(args)
    rep = theorem4_check(
        spec, args.candidate, args.y, eps_schedule=args.eps, horizon=args.horizon, tol=args.tol
    )
    config = _config(
        args, source=source, candidates=(args.candidate,), extra={"y": " ".join(_point_text(y) for y in args.y)}
    )
    _write(args.out, render_csv(rep.rows(), config.as_header(), ("y",) + CSV_COLUMNS))
    if rep.hypothesis:
        return rep.verdict, rep.hypothesis
    parts = [f"y={y}: {r.verdict}" for y, r in rep.per_y.items()]
    breaches = sum(rep.bound_violations.values())
    return rep.verdict, "; ".join(parts) + f"; pointwise bound breaches {breaches}"


_COMMANDS = {
    "axioms": _cmd_axioms,
    "density": _cmd_density,
    "stat-limit": _cmd_stat_limit,
    "stat-cauchy": _cmd_stat_cauchy,
    "bounded": _cmd_bounded,
    "extract-k": _cmd_extract_k,
    "verify-k": _cmd_verify_k,
    "theorem4": _cmd_theorem4,
}


def run(argv=None, out=None, err=None) -> int:
    """Run one subcommand and return its exit code."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        verdict, detail = _COMMANDS[args.command](args, out)
    except InputError as exc:
        print(f"metriclike: error: {exc}", file=err)
        return EXIT_INPUT_ERROR
    except (ValueError, ZeroDivisionError, CarrierError) as exc:
        print(f"metriclike: error: {exc}", file=err)
        return EXIT_INPUT_ERROR
    print(f"{args.command}: {verdict} ({detail})", file=out)
    return verdict.exit_code


def main(argv=None) -> None:
    sys.exit(run(argv))
