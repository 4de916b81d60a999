"""Exponential reference solvers that follow the game definitions literally.

Nothing here uses the decomposition results; these functions are the trusted
side of every equivalence test. Keep ``n`` small (default cap 8).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import CapExceeded, Infeasible, PreconditionViolated
from .model import INF, Instance, ItemSet, Kind, completions
from .onestage import attack_value

DEFAULT_CAP = 8


def _check(instance: Instance, cap: int, kind: Kind | None = None):
    if instance.n > cap:
        raise CapExceeded(f"n={instance.n} exceeds oracle cap {cap}")
    if kind is not None and instance.kind is not kind:
        raise PreconditionViolated(f"expected a {kind.value} instance, got {instance.kind.value}")


def _all_subsets(n: int) -> Iterable[ItemSet]:
    for size in range(n + 1):
        for combo in itertools.combinations(range(n), size):
            yield frozenset(combo)


def _finish(value):
    if value == INF:
        raise Infeasible("no feasible solution")
    return Fraction(value)


# ---------------------------------------------------------------------------
# Piecewise-linear budget curves
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BudgetCurve:
    """Continuous piecewise-linear function on ``[0, end]``.

    ``points`` are the breakpoints ``(budget, value)`` in strictly increasing
    budget order; the function is linear between consecutive points.
    """

    points: tuple[tuple[Fraction, Fraction], ...]

    @classmethod
    def attack(cls, base: Fraction, increments: Sequence[Fraction], end: Fraction) -> "BudgetCurve":
        """Fractional-knapsack attack value as a function of the budget."""
        ranked = sorted(increments, reverse=True)
        pts = [(Fraction(0), Fraction(base))]
        value = Fraction(base)
        k = 0
        while k < len(ranked) and k + 1 <= end:
            value += ranked[k]
            k += 1
            pts.append((Fraction(k), value))
        if pts[-1][0] < end:
            slope = ranked[k] if k < len(ranked) else 0
            pts.append((Fraction(end), value + slope * (end - pts[-1][0])))
        return cls(tuple(pts))

    def __call__(self, t: Fraction) -> Fraction:
        pts = self.points
        if t <= pts[0][0]:
            return pts[0][1]
        for (t0, v0), (t1, v1) in zip(pts, pts[1:]):
            if t <= t1:
                return v0 + (v1 - v0) * (t - t0) / (t1 - t0)
        return pts[-1][1]

    def segment(self, t0: Fraction, t1: Fraction) -> tuple[Fraction, Fraction]:
        """Return ``(intercept, slope)`` of the curve restricted to ``[t0, t1]``."""
        v0, v1 = self(t0), self(t1)
        slope = (v1 - v0) / (t1 - t0)
        return v0 - slope * t0, slope


def _crossings(curves: Sequence[BudgetCurve], end: Fraction) -> set[Fraction]:
    """Pairwise intersection points inside every unit segment of ``[0, end]``."""
    out: set[Fraction] = set()
    cuts = sorted({Fraction(k) for k in range(int(end) + 1)} | {end})
    for t0, t1 in zip(cuts, cuts[1:]):
        lines = [c.segment(t0, t1) for c in curves]
        for (a1, s1), (a2, s2) in itertools.combinations(set(lines), 2):
            if s1 == s2:
                continue
            t = (a2 - a1) / (s1 - s2)
            if t0 <= t <= t1:
                out.add(t)
    return out


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------


def brute_rob_discrete(instance: Instance, cap: int = DEFAULT_CAP) -> Fraction:
    """min_x max_S1 min_y max_S2 by full enumeration of attack sets."""
    _check(instance, cap, Kind.DISCRETE)
    costs, problem = instance.costs, instance.nominal
    n, gamma = instance.n, instance.int_gamma
    c_lo, c_inc, d_lo, d_inc = costs.c_lo, costs.c_inc, costs.d_lo, costs.d_inc
    attack_sets = [s for s in _all_subsets(n) if len(s) <= gamma]

    @lru_cache(maxsize=None)
    def adv_rec(y: ItemSet, budget: int):
        return max(
            sum((d_lo[i] + (d_inc[i] if i in s2 else 0) for i in y), Fraction(0))
            for s2 in attack_sets
            if len(s2) <= budget
        )

    @lru_cache(maxsize=None)
    def rec(x: ItemSet, budget: int):
        return min((adv_rec(y, budget) for y in completions(problem, x)), default=INF)

    best = INF
    for x in _all_subsets(n):
        worst = -INF
        for s1 in attack_sets:
            first = sum((c_lo[i] + (c_inc[i] if i in s1 else 0) for i in x), Fraction(0))
            worst = max(worst, first + rec(x, gamma - len(s1)))
            if worst == INF:
                break
        best = min(best, worst)
    return _finish(best)


def brute_rob_continuous(
    instance: Instance,
    cap: int = DEFAULT_CAP,
    extra_points: Iterable[Fraction] = (),
) -> Fraction:
    """Exact min-max-min-max with fractional attacks.

    For each first-stage set the adversary's payoff is piecewise linear in the
    stage-one spend; it is evaluated at every breakpoint (integer spends, the
    kinks of the second-stage curves, and all crossings of those curves).
    ``extra_points`` adds sample spends; it must never change the result.
    """
    _check(instance, cap, Kind.CONTINUOUS)
    best = INF
    for x in _all_subsets(instance.n):
        best = min(best, brute_adv_continuous(instance, x, extra_points))
    return _finish(best)


def brute_adv_continuous(
    instance: Instance, x: ItemSet, extra_points: Iterable[Fraction] = ()
):
    """Adversary value of a fixed first-stage set; +inf if it has no completion."""
    costs, problem = instance.costs, instance.nominal
    gamma = instance.gamma
    ys = list(completions(problem, frozenset(x)))
    if not ys:
        return INF
    first = BudgetCurve.attack(
        sum((costs.c_lo[i] for i in x), Fraction(0)), [costs.c_inc[i] for i in x], gamma
    )
    second = [
        BudgetCurve.attack(
            sum((costs.d_lo[i] for i in y), Fraction(0)), [costs.d_inc[i] for i in y], gamma
        )
        for y in ys
    ]
    spends = {Fraction(k) for k in range(int(gamma) + 1)} | {gamma}
    spends |= {gamma - k for k in range(int(gamma) + 1)}
    spends |= {gamma - t for t in _crossings(second, gamma)}
    spends |= {Fraction(t) for t in extra_points if 0 <= t <= gamma}
    return max(first(s) + min(curve(gamma - s) for curve in second) for s in spends)


def brute_variant(instance: Instance, cap: int = DEFAULT_CAP) -> Fraction:
    """Absolute-budget variant, enumerating candidate stage-one spends."""
    _check(instance, cap, Kind.VARIANT)
    costs, problem = instance.costs, instance.nominal
    gamma = instance.gamma
    best = INF
    for x in _all_subsets(instance.n):
        ys = list(completions(problem, x))
        if not ys:
            continue
        base_x = sum((costs.c_lo[i] for i in x), Fraction(0))
        room_x = sum((costs.c_inc[i] for i in x), Fraction(0))
        d_base = [sum((costs.d_lo[i] for i in y), Fraction(0)) for y in ys]
        d_room = [sum((costs.d_inc[i] for i in y), Fraction(0)) for y in ys]
        top = min(gamma, room_x)
        spends = {Fraction(0), top}
        spends |= {min(max(gamma - r, Fraction(0)), top) for r in d_room}

        def payoff(g):
            second = min(b + min(gamma - g, r) for b, r in zip(d_base, d_room))
            return base_x + min(g, room_x) + second

        best = min(best, max(payoff(g) for g in spends))
    return _finish(best)


def brute_onestage(instance: Instance, cap: int = DEFAULT_CAP) -> Fraction:
    """Static policy: fix (x, y) up front, then face one combined attack."""
    _check(instance, cap)
    if instance.kind is Kind.VARIANT:
        raise PreconditionViolated("the static oracle covers continuous and discrete kinds")
    mode = "discrete" if instance.kind is Kind.DISCRETE else "continuous"
    costs = instance.costs
    best = INF
    for z in instance.nominal.solutions():
        for x in _all_subsets_of(z):
            y = z - x
            base = [costs.c_lo[i] for i in x] + [costs.d_lo[i] for i in y]
            incs = [costs.c_inc[i] for i in x] + [costs.d_inc[i] for i in y]
            best = min(best, attack_value(base, incs, instance.gamma, mode))
    return _finish(best)


def _all_subsets_of(z: ItemSet) -> Iterable[ItemSet]:
    items = sorted(z)
    for size in range(len(items) + 1):
        for combo in itertools.combinations(items, size):
            yield frozenset(combo)


def brute_type8(
    nominal,
    a: Sequence[Fraction],
    b: Sequence[Fraction],
    c: Sequence[Fraction],
    v: Fraction = Fraction(0),
    forced_item: int | None = None,
) -> Fraction:
    """Double enumeration over X_nom x X_nom for a coordination subproblem."""
    best = INF
    sols = list(nominal.solutions())
    for z1 in sols:
        for z2 in sols:
            both = z1 & z2
            if forced_item is not None and forced_item not in both:
                continue
            for x in _all_subsets_of(both):
                if forced_item is not None and forced_item not in x:
                    continue
                value = (
                    sum((a[i] for i in x), Fraction(0))
                    + sum((b[i] for i in z1 - x), Fraction(0))
                    + sum((c[i] for i in z2 - x), Fraction(0))
                    + v
                )
                best = min(best, value)
    return _finish(best)
