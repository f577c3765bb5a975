"""Metric-like spaces, natural density and statistical convergence.

A metric-like distance may be positive on the diagonal, so balls and limits
are measured against the self-distance delta(x, x).  The package evaluates
piecewise sequences exactly, estimates densities of index sets, and returns
three-valued verdicts that are certified only up to a finite horizon.
"""

__version__ = "0.1.0"

from .analysis import (
    check_bounded,
    check_convergence,
    stat_cauchy_profile,
    stat_convergence_profile,
    stat_limit_candidates,
    suggest_cauchy_l,
    theorem4_check,
    violation_set,
)
from .density import (
    All,
    Arith,
    Complement,
    Finite,
    Intersection,
    Predicate,
    Squares,
    Union,
    estimate_double_density,
    estimate_natural_density,
    exact_density,
    parse_index_set,
    prefix_density,
)
from .points import PointValue, parse_point, register_tag
from .seqspec import builtin_spec, derived_real_sequence, eval_at, parse_spec, render_spec
from .spaces import IRRATIONAL_SUM, MAX, SUM, MetricLikeSpace, ball_member, builtin_space, check_axioms
from .subseq import extract_plan, find_thresholds, build_levels, stat_from_subsequence, verify_plan
from .verdict import Verdict

__all__ = [
    "__version__",
    "Verdict",
    "PointValue",
    "parse_point",
    "register_tag",
    "MetricLikeSpace",
    "SUM",
    "IRRATIONAL_SUM",
    "MAX",
    "builtin_space",
    "check_axioms",
    "ball_member",
    "All",
    "Arith",
    "Complement",
    "Finite",
    "Intersection",
    "Predicate",
    "Squares",
    "Union",
    "prefix_density",
    "exact_density",
    "estimate_natural_density",
    "estimate_double_density",
    "parse_index_set",
    "parse_spec",
    "render_spec",
    "builtin_spec",
    "eval_at",
    "derived_real_sequence",
    "check_convergence",
    "check_bounded",
    "stat_convergence_profile",
    "stat_limit_candidates",
    "stat_cauchy_profile",
    "suggest_cauchy_l",
    "theorem4_check",
    "violation_set",
    "build_levels",
    "find_thresholds",
    "extract_plan",
    "verify_plan",
    "stat_from_subsequence",
]
