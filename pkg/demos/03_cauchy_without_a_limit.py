"""Statistically Cauchy, yet statistically convergent to nothing.

In the irrational-sum space (distance 0 only for an irrational point with
itself, x + y otherwise) take x_n = k on n = k*k and 1/n elsewhere.  Pairs
of non-square indices get closer and closer to 0, so the double sequence of
distances clusters at 0.  But no single point is a limit: a rational point
has positive self-distance, and the terms drift away from any irrational one.
"""

from fractions import Fraction

from metriclike import builtin_spec, parse_point, stat_cauchy_profile, stat_limit_candidates, suggest_cauchy_l
from metriclike.report import exact_text

spec = builtin_spec("example-4")

print("suggested pair limits:", [str(v) for v in suggest_cauchy_l(spec)])

rep = stat_cauchy_profile(spec, 0, eps_schedule=(Fraction(1, 2),), grid=(10**3, 10**4), tol=Fraction(3, 100))
est = rep.outcomes[0].estimate
for n, count, v in zip(est.schedule, est.counts, est.values):
    print(f"  N = {n}: {count} of {n * n} pairs at distance >= 1/2 (density {exact_text(v)} = {float(v):.6f})")
print(f"statistically Cauchy with l = 0: {rep.verdict}")

for candidate, rep in stat_limit_candidates(spec, [2, parse_point("irr:sqrt2")]).items():
    final = rep.outcome(Fraction(1, 2)).estimate.final
    print(f"statistical limit {candidate}: {rep.verdict} (A(1/2) density {float(final):.6f})")
