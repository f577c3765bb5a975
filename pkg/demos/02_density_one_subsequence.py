"""From a statistical limit to an ordinary one along a density-one set, and back.

Level j collects the indices whose deviation from the limit is below 1/j.
Thresholds v_1 < v_2 < ... are chosen so that from v_j on, level j fills more
than (j - 1)/j of every prefix.  Gluing the levels between consecutive
thresholds gives an index set K of density one along which the sequence
converges in the ordinary sense.
"""

from metriclike import Complement, Squares, builtin_spec, extract_plan, stat_from_subsequence, verify_plan
from metriclike.report import decimal12
from metriclike.subseq import plan_from_text

spec = builtin_spec("example-3")

plan = extract_plan(spec, 2, j_max=5, horizon=10**6)
print(plan.to_text())

check = verify_plan(plan, spec)
print(f"plan check: {check.verdict}; density of K at 10^6 = {decimal12(check.density.final)}")

# A plan is plain text; replaying it rebuilds K from the sequence and the stored thresholds.
replayed = plan_from_text(plan.to_text(), spec)
print(f"replayed plan: {verify_plan(replayed, spec).verdict}")

# A doctored threshold is caught.
doctored = plan_from_text(plan.to_text().replace("level 1 v=2", "level 1 v=9"), spec)
bad = verify_plan(doctored, spec)
print(f"doctored plan: {bad.verdict}; {bad.reasons}")

# The converse: ordinary convergence along a density-one K forces a statistical limit.
for K in (Complement(Squares()), Squares()):
    rep = stat_from_subsequence(K, spec, 2)
    print(f"K = {K.describe()}: {rep.verdict} ({rep.note})")
