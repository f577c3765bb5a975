"""A sequence that converges statistically but is unbounded.

In the sum space (distance 0 on equal points, x + y otherwise) take
x_n = k when n = k*k and x_n = 2 otherwise.  Off the squares the sequence
sits exactly on 2, so only the squares ever leave a ball around 2, and the
squares have density zero.  The square terms also grow without limit, so
no bound holds.
"""

from fractions import Fraction

from metriclike import builtin_spec, check_bounded, check_convergence, stat_convergence_profile
from metriclike.report import decimal12

spec = builtin_spec("example-3")
print(spec)

# Ordinary convergence: every square beyond 4 breaks the 1/2-ball around 2.
conv = check_convergence(spec, 2, eps_schedule=(Fraction(1, 2),))
outcome = conv.outcomes[0]
print(f"usual convergence to 2: {conv.verdict}; first escapes at n = {outcome.first_violations}")

# Statistical convergence: the escapes are the squares, a vanishing fraction.
profile = stat_convergence_profile(spec, 2, eps_schedule=(1, Fraction(1, 2), Fraction(1, 4)))
print(f"statistical convergence to 2: {profile.verdict}")
for o in profile.outcomes:
    steps = ", ".join(f"{n}: {decimal12(v)}" for n, v in zip(o.estimate.schedule, o.estimate.values))
    print(f"  eps = {o.epsilon}: violation density {steps}")

# The wrong candidate fails: almost every term is 7 away from 5.
print(f"statistical convergence to 5: {stat_convergence_profile(spec, 5).verdict}")

# Unbounded: the pair (k*k, 1) is k + 1 apart.
for bound in (10, 100, 1000):
    rep = check_bounded(spec, bound, bound * bound + 1)
    m, n = rep.witness
    print(f"delta(x_{m}, x_{n}) = {rep.distance} > {bound}")
