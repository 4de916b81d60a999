import pytest
from hypothesis import given
from strategies import instances, table1

from twostage_robust import Kind, PreconditionViolated, nominal_solve, solve_variant
from twostage_robust.oracle import brute_variant


@pytest.mark.parametrize(
    "gamma, value, branch",
    [(1, 5, "lower_plus_gamma"), (0, 4, "lower_plus_gamma"), (10, 12, "upper")],
)
def test_table1(gamma, value, branch):
    rep = solve_variant(table1(Kind.VARIANT, gamma))
    assert rep.value == value
    assert rep.provenance["branch"] == branch


def test_tie_goes_to_upper_branch():
    # lower branch 4 + 8 = 12 equals the upper branch 12
    rep = solve_variant(table1(Kind.VARIANT, 8))
    assert rep.value == 12 and rep.provenance["branch"] == "upper"


def test_requires_variant_kind():
    with pytest.raises(PreconditionViolated):
        solve_variant(table1(Kind.DISCRETE))


@given(inst=instances(kind=Kind.VARIANT, max_n=6, max_gamma=30))
def test_matches_oracle(inst):
    assert solve_variant(inst).value == brute_variant(inst)


@given(inst=instances(kind=Kind.VARIANT, max_n=7))
def test_monotone_and_eventually_constant(inst):
    costs = inst.costs
    upper = nominal_solve(inst.nominal, [min(c, d) for c, d in zip(costs.c_hi, costs.d_hi)])[0]
    lower = nominal_solve(inst.nominal, [min(c, d) for c, d in zip(costs.c_lo, costs.d_lo)])[0]
    values = [solve_variant(inst.with_gamma(g)).value for g in range(0, 40, 3)]
    assert values == sorted(values)
    plateau = upper - lower
    assert solve_variant(inst.with_gamma(plateau)).value == upper
    assert solve_variant(inst.with_gamma(plateau + 7)).value == upper
