"""Random oracle-equivalence suites shared by the ``verify`` command and the tests."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from ..cont_decomp import solve_continuous
from ..disc_exact import solve_discrete_exact, solve_equal_costs_gamma1
from ..model import CostProfile, Instance, Kind, RepSelection, Selection
from ..onestage import static_solve
from ..oracle import brute_onestage, brute_rob_continuous, brute_rob_discrete, brute_variant
from ..variant_budget import solve_variant


def random_nominal(rng: random.Random, n: int, max_p: int = 3):
    """Selection with ``p <= max_p`` or representative selection with 2-item parts.

    Representative selection rounds an odd ``n`` down to the next even size.
    """
    if rng.random() < 0.5 or n < 2:
        return Selection(n, rng.randint(1, min(max_p, n)))
    return RepSelection(tuple((2 * j, 2 * j + 1) for j in range(n // 2)))


def random_instance(
    rng: random.Random,
    n: int,
    kind: Kind = Kind.DISCRETE,
    max_cost: int = 20,
    max_gamma: int = 3,
    max_p: int = 3,
) -> Instance:
    """Costs with lower bounds and increments uniform in ``0..max_cost``."""
    nominal = random_nominal(rng, n, max_p)
    n = nominal.n
    c_lo = [rng.randint(0, max_cost) for _ in range(n)]
    d_lo = [rng.randint(0, max_cost) for _ in range(n)]
    c_hi = [v + rng.randint(0, max_cost) for v in c_lo]
    d_hi = [v + rng.randint(0, max_cost) for v in d_lo]
    gamma = rng.randint(0, max_gamma)
    return Instance(nominal, CostProfile(c_lo, c_hi, d_lo, d_hi), gamma, kind)


def random_equal_cost_instance(rng: random.Random, n: int, max_cost: int = 20) -> Instance:
    """Identical stage costs, budget one; nominal structure of either class."""
    if rng.random() < 0.5:
        nominal = Selection(n, rng.randint(1, n))
    else:
        parts, i = [], 0
        while i < n:
            size = min(rng.choice((1, 2, 2)), n - i)
            parts.append(tuple(range(i, i + size)))
            i += size
        nominal = RepSelection(tuple(parts))
    lo = [rng.randint(0, max_cost) for _ in range(n)]
    hi = [v + rng.choice((0, rng.randint(0, max_cost))) for v in lo]
    return Instance(nominal, CostProfile(lo, hi, lo, hi), 1, Kind.DISCRETE)


SolverPair = tuple[Callable[[Instance], Fraction], Callable[[Instance], Fraction]]

SUITES: dict[str, tuple[Kind, SolverPair]] = {
    "continuous": (
        Kind.CONTINUOUS,
        (lambda i: solve_continuous(i).value, brute_rob_continuous),
    ),
    "discrete": (
        Kind.DISCRETE,
        (lambda i: solve_discrete_exact(i).value, brute_rob_discrete),
    ),
    "variant": (Kind.VARIANT, (lambda i: solve_variant(i).value, brute_variant)),
    "static": (Kind.DISCRETE, (lambda i: static_solve(i).value, brute_onestage)),
}


@dataclass
class Mismatch:
    suite: str
    instance: Instance
    solver: Fraction
    oracle: Fraction


@dataclass
class VerifyResult:
    checked: dict[str, int] = field(default_factory=dict)
    mismatches: list[Mismatch] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def run_verification(
    count: int,
    seed: int = 0,
    sizes=(4, 5, 6),
    suites=tuple(SUITES),
    equal_cost: int = 0,
    equal_cost_sizes=range(2, 15),
    on_instance: Optional[Callable[[str, Instance], None]] = None,
) -> VerifyResult:
    """Compare every solver with its oracle on ``count`` random instances per suite.

    ``equal_cost`` additionally checks the budget-one equal-cost routine
    against the exact discrete search on that many instances.
    """
    rng = random.Random(seed)
    result = VerifyResult()
    for name in suites:
        kind, (solver, oracle) = SUITES[name]
        for _ in range(count):
            instance = random_instance(rng, rng.choice(list(sizes)), kind)
            if on_instance is not None:
                on_instance(name, instance)
            a, b = solver(instance), oracle(instance)
            result.checked[name] = result.checked.get(name, 0) + 1
            if a != b:
                result.mismatches.append(Mismatch(name, instance, a, b))
    for _ in range(equal_cost):
        instance = random_equal_cost_instance(rng, rng.choice(list(equal_cost_sizes)))
        a = solve_equal_costs_gamma1(instance).value
        b = solve_discrete_exact(instance).value
        result.checked["equalcost"] = result.checked.get("equalcost", 0) + 1
        if a != b:
            result.mismatches.append(Mismatch("equalcost", instance, a, b))
    return result
