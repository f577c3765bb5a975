from fractions import Fraction

import pytest

from metriclike.analysis import (
    AnalysisRequest,
    check_bounded,
    check_convergence,
    stat_cauchy_profile,
    stat_convergence_profile,
    stat_limit_candidates,
    suggest_cauchy_l,
    theorem4_check,
    violation_set,
)
from metriclike.points import PointValue, parse_point
from metriclike.seqspec import builtin_spec, parse_spec
from metriclike.verdict import Verdict

from oracles import ex3_term, ex3_violations, ex4_cauchy_pairs_brute, ex4_cauchy_pairs_closed_form

EX3 = builtin_spec("example-3")
EX4 = builtin_spec("example-4")
CONST = parse_spec("space sum\npiece otherwise -> 3\n")
MAX_HARMONIC = parse_spec("space max\npiece otherwise -> 1/n\n")
H = 10**5


def test_request_validation():
    with pytest.raises(ValueError):
        AnalysisRequest(EX3, 2, eps_schedule=(Fraction(1, 2), 1))
    with pytest.raises(ValueError):
        AnalysisRequest(EX3, 2, eps_schedule=(0,))
    with pytest.raises(ValueError):
        AnalysisRequest(EX3, 2, tol=0)
    with pytest.raises(ValueError):
        AnalysisRequest(EX3, 2, grid=(100, 100))
    with pytest.raises(ValueError):
        AnalysisRequest(EX4, 0)


def test_convergence_of_constant_sequence():
    rep = check_convergence(CONST, 3, horizon=1000)
    assert rep.verdict is Verdict.PASS
    assert all(o.k_o == 1 for o in rep.outcomes)


def test_example3_is_not_convergent():
    rep = check_convergence(EX3, 2, eps_schedule=(Fraction(1, 2),), horizon=H)
    assert rep.verdict is Verdict.FAIL
    assert rep.outcomes[0].first_violations == (1, 9, 16, 25, 36)


def test_max_space_convergence():
    rep = check_convergence(MAX_HARMONIC, 0, horizon=1000)
    assert rep.verdict is Verdict.PASS
    assert rep.outcome(Fraction(1, 8)).k_o == 9


def test_recurring_violations_fail_before_the_horizon():
    rep = check_convergence(EX3, 2, eps_schedule=(1,), horizon=99_999)
    assert rep.verdict is Verdict.FAIL and rep.outcomes[0].k_o is None


def test_late_transient_is_inconclusive():
    spec = parse_spec("space sum\npiece finite:[700] -> 5\npiece otherwise -> 2\n")
    rep = check_convergence(spec, 2, eps_schedule=(1,), horizon=1000)
    assert rep.verdict is Verdict.INCONCLUSIVE
    assert rep.outcomes[0].k_o == 701


def test_convergence_within_subset():
    from metriclike.density import Complement, Squares

    rep = check_convergence(EX3, 2, horizon=1000, within=Complement(Squares()))
    assert rep.verdict is Verdict.PASS


@pytest.mark.parametrize("bound, witness, distance", [(10, (100, 1), 11), (50, (2500, 1), 51)])
def test_bounded_witnesses(bound, witness, distance):
    rep = check_bounded(EX3, bound, bound * bound + 1)
    assert rep.witness == witness
    assert rep.distance == PointValue(distance)
    assert rep.verdict is Verdict.FAIL


@pytest.mark.parametrize(
    "horizon, witness, distance",
    [(99, (81, 2), 11), (80, (9, 64), 11), (48, (25, 36), 11), (35, None, None)],
)
def test_bounded_below_the_square_horizon(horizon, witness, distance):
    # below 101 the anchor x_1 = 1 has no partner beyond 10; horizons 80 and 48
    # also defeat the second anchor, so the witness comes from the full scan
    rep = check_bounded(EX3, 10, horizon)
    assert rep.witness == witness
    if horizon < 81:
        # no anchor row hits, so the row-major first pair is reported
        brute = next(
            ((m, n) for m in range(1, horizon + 1) for n in range(1, horizon + 1)
             if ex3_term(m) != ex3_term(n) and ex3_term(m) + ex3_term(n) > 10),
            None,
        )
        assert rep.witness == brute
    assert rep.distance == (None if distance is None else PointValue(distance))


def test_constant_sequence_is_bounded():
    rep = check_bounded(CONST, 2 * 3 + 1, 500)
    assert rep.bounded and rep.verdict is Verdict.PASS


def test_stat_limit_example3_matches_oracle():
    eps = (1, Fraction(1, 2), Fraction(1, 4))
    rep = stat_convergence_profile(EX3, 2, eps_schedule=eps, horizon=H)
    assert rep.verdict is Verdict.PASS
    for e in eps:
        assert rep.outcome(e).violation_count == ex3_violations(2, Fraction(e), H)


def test_stat_limit_example3_wrong_candidate():
    reps = stat_limit_candidates(EX3, [2, 5], horizon=H)
    assert [r.verdict for r in reps.values()] == [Verdict.PASS, Verdict.FAIL]
    assert reps[PointValue(5)].outcome(1).violation_count == ex3_violations(5, Fraction(1), H)


def test_stat_limit_constant_sequence_has_empty_violation_sets():
    rep = stat_convergence_profile(CONST, 3, horizon=1000)
    assert rep.verdict is Verdict.PASS
    assert all(o.violation_count == 0 for o in rep.outcomes)


def test_example4_has_no_statistical_limit():
    reps = stat_limit_candidates(EX4, [2, parse_point("irr:sqrt2")], horizon=H)
    assert all(r.verdict is Verdict.FAIL for r in reps.values())


def test_max_space_limits_are_not_unique():
    for y in (0, 1, Fraction(7, 2)):
        rep = stat_convergence_profile(MAX_HARMONIC, y, horizon=H)
        assert rep.verdict is Verdict.PASS


def test_violation_set_membership():
    a = violation_set(EX3, 2, Fraction(1, 2), horizon=100)
    assert [n for n in range(1, 101) if n in a] == [1, 9, 16, 25, 36, 49, 64, 81, 100]
    assert 121 in a and 122 not in a


def test_cauchy_counts_match_both_oracles():
    assert ex4_cauchy_pairs_brute(300) == ex4_cauchy_pairs_closed_form(300)
    rep = stat_cauchy_profile(EX4, 0, eps_schedule=(Fraction(1, 2),), grid=(100, 300, 1000), tol=Fraction(3, 100))
    assert rep.outcomes[0].estimate.counts == tuple(ex4_cauchy_pairs_closed_form(n) for n in (100, 300, 1000))


def test_cauchy_constant_irrational_sequence():
    spec = parse_spec("space irrational_sum\npiece otherwise -> irr:sqrt2\n")
    rep = stat_cauchy_profile(spec, 0, grid=(10, 100))
    assert rep.verdict is Verdict.PASS
    assert all(o.violation_count == 0 for o in rep.outcomes)


def test_cauchy_example3():
    # violating pairs need a square coordinate, about 2 / sqrt(N) of the square
    eps = (Fraction(1, 2),)
    rep = stat_cauchy_profile(EX3, 0, eps_schedule=eps, grid=(3000, 30000), tol=Fraction(3, 100))
    assert rep.verdict is Verdict.PASS
    assert stat_cauchy_profile(EX3, 0, grid=(10**3, 10**4)).verdict is Verdict.INCONCLUSIVE


def test_cauchy_rejects_negative_l():
    with pytest.raises(ValueError):
        stat_cauchy_profile(EX3, -1)


def test_suggested_pair_limits():
    assert PointValue(0) in suggest_cauchy_l(EX4)
    assert suggest_cauchy_l(EX3) == [PointValue(0)]
    assert suggest_cauchy_l(CONST) == [PointValue(0)]
    assert suggest_cauchy_l(parse_spec("space max\npiece otherwise -> 3\n")) == [PointValue(3)]


def test_theorem4_example3():
    rep = theorem4_check(EX3, 2, [3, 2], horizon=H)
    assert rep.verdict is Verdict.PASS
    assert rep.self_distance == 0
    assert rep.bound_violations == {PointValue(3): 0, PointValue(2): 0}


def test_theorem4_needs_zero_self_distance():
    rep = theorem4_check(parse_spec("space irrational_sum\npiece otherwise -> 2\n"), 2, [3], horizon=1000)
    assert rep.verdict is Verdict.NOT_APPLICABLE
    assert "self-distance" in rep.hypothesis


def test_theorem4_needs_a_statistical_limit():
    rep = theorem4_check(EX3, 5, [3], horizon=1000)
    assert rep.verdict is Verdict.NOT_APPLICABLE


def test_csv_is_deterministic():
    a = stat_convergence_profile(EX3, 2, horizon=10**4).to_csv({"run": 1})
    b = stat_convergence_profile(EX3, 2, horizon=10**4).to_csv({"run": 1})
    assert a == b
    lines = a.splitlines()
    assert lines[0] == "# run: 1"
    assert lines[1] == "epsilon,schedule_n,violation_count,density,density_exact,verdict"
    # the tail 3/100 -> 99/10000 moves by more than tol at this short horizon
    assert lines[-1] == "1/8,10000,99,0.009900000000,99/10000,inconclusive"
