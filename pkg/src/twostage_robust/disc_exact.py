"""Exact solvers for two-stage discrete budgets.

``solve_discrete_exact`` searches first-stage sets with a depth-first
branch and bound. At a node some items are fixed into ``x``, some are fixed
out of ``x`` and the rest are open. For any first-stage set reachable from the
node and any stage-one spend ``g`` on the fixed items,

    Adv >= c_lo(x_fixed) + top_g(c_inc of x_fixed)
           + min_pi [ (Gamma - g) * pi + cheapest completion ]

where open items may enter the completion at ``min(c_lo, d_pi)`` (they might
still be bought up front) and fixed-out items only at ``d_pi``. At a leaf the
bound is the exact adversarial value, so one routine serves both purposes.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import Infeasible, PreconditionViolated, TimeLimitExceeded
from .model import (
    INF,
    Instance,
    ItemSet,
    Kind,
    RepSelection,
    Selection,
    nominal_solve,
    scaled_integers,
)
from .onestage import static_solve
from .report import SolveReport, stopwatch


@dataclass(frozen=True)
class AttackSplit:
    gamma1: int
    stage1: ItemSet = frozenset()
    stage2: ItemSet = frozenset()
    completion: ItemSet = frozenset()


@dataclass(frozen=True)
class EqualCostSubproblem:
    pi0: Fraction
    pi1: Fraction
    increments: tuple[Fraction, ...] = field(repr=False, default=())

    @property
    def forbidden_y0(self) -> ItemSet:
        return frozenset(i for i, inc in enumerate(self.increments) if inc > self.pi0)

    @property
    def forbidden_x(self) -> ItemSet:
        return frozenset(i for i, inc in enumerate(self.increments) if inc > self.pi1)


def _require_discrete(instance: Instance):
    if instance.kind is not Kind.DISCRETE:
        raise PreconditionViolated("expected a discrete-budget instance")
    if instance.gamma.denominator != 1 or instance.gamma < 0:
        raise PreconditionViolated("discrete budgets must be nonnegative integers")


def _key(x: ItemSet):
    return (len(x), tuple(sorted(x)))


# ---------------------------------------------------------------------------
# Stage-wise evaluators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Scaled:
    """Costs multiplied by the LCM of their denominators (plain ints)."""

    scale: int
    c_lo: list
    c_inc: list
    d_lo: list
    d_inc: list
    pis: tuple

    @classmethod
    def of(cls, instance: Instance) -> "_Scaled":
        scale, (cl, ch, dl, dh) = scaled_integers(instance.costs)
        d_inc = [h - l for l, h in zip(dl, dh)]
        c_inc = [h - l for l, h in zip(cl, ch)]
        return cls(scale, cl, c_inc, dl, d_inc, tuple(sorted(set(d_inc) | {0})))


def _rec_scaled(problem, sc: _Scaled, x: ItemSet, remaining_budget: int):
    best = (INF, None)
    for pi in sc.pis:
        weights = [
            0 if i in x else l + max(inc - pi, 0) for i, (l, inc) in enumerate(zip(sc.d_lo, sc.d_inc))
        ]
        try:
            value, z = nominal_solve(problem, weights, forced_in=x)
        except Infeasible:
            return INF, None
        value += remaining_budget * pi
        if value < best[0]:
            best = (value, z - x)
    return best


def _adv_scaled(problem, sc: _Scaled, gamma: int, x: ItemSet):
    ranked = sorted(x, key=lambda i: (-sc.c_inc[i], i))
    base = sum(sc.c_lo[i] for i in x)
    best_value, best_split = -INF, None
    for g in sorted(set(range(min(gamma, len(x)) + 1)) | {gamma}):
        hit = ranked[:g]
        second, y = _rec_scaled(problem, sc, x, gamma - g)
        total = base + sum(sc.c_inc[i] for i in hit) + second
        if total > best_value:
            if y is None:
                split = AttackSplit(g, frozenset(hit))
            else:
                stage2 = sorted(y, key=lambda i: (-sc.d_inc[i], i))[: gamma - g]
                split = AttackSplit(g, frozenset(hit), frozenset(stage2), y)
            best_value, best_split = total, split
    return best_value, best_split


def _unscale(value, scale: int):
    return value if value in (INF, -INF) else Fraction(value) / scale


def rec_discrete(instance: Instance, x: ItemSet, remaining_budget: int):
    """Second-stage cost of the best completion against ``remaining_budget``.

    Returns ``(value, completion)``; ``value`` is +inf when ``x`` cannot be
    completed. First-stage costs are not included.
    """
    sc = _Scaled.of(instance)
    value, y = _rec_scaled(instance.nominal, sc, frozenset(x), remaining_budget)
    return _unscale(value, sc.scale), y


def adv_discrete(instance: Instance, x: ItemSet):
    """Adversarial value of first-stage set ``x`` and the attack achieving it."""
    _require_discrete(instance)
    sc = _Scaled.of(instance)
    value, split = _adv_scaled(instance.nominal, sc, instance.int_gamma, frozenset(x))
    return _unscale(value, sc.scale), split


# ---------------------------------------------------------------------------
# Branch and bound
# ---------------------------------------------------------------------------

_OPEN, _IN, _OUT, _BLOCKED = 0, 1, 2, 3


class _Search:
    def __init__(self, instance: Instance, deadline: Optional[float]):
        self.instance = instance
        self.deadline = deadline
        self.nodes = 0
        problem = instance.nominal
        scale, (cl, ch, dl, dh) = scaled_integers(instance.costs)
        self.scale = scale
        n = self.n = instance.n
        self.gamma = instance.int_gamma
        self.cl = cl
        self.dc = [h - l for l, h in zip(cl, ch)]
        dd = [h - l for l, h in zip(dl, dh)]
        pis = sorted(set(dd) | {0})
        magnitude = max([abs(v) for v in cl + ch + dl + dh] + [1])
        exact_int64 = (n + 1) * magnitude * (self.gamma + 2) * 8 < 2**62
        dtype = np.int64 if exact_int64 else object
        self.P = np.array(pis, dtype=dtype)
        d_lo = np.array(dl, dtype=dtype)
        d_inc = np.array(dd, dtype=dtype)
        c_lo = np.array(cl, dtype=dtype)
        zero = np.zeros((), dtype=dtype) if dtype is np.int64 else 0
        self.D = d_lo[None, :] + np.maximum(d_inc[None, :] - self.P[:, None], zero)
        self.U = np.minimum(self.D, c_lo[None, :])
        self.big = np.array((magnitude + 1) * 4, dtype=dtype)
        self.is_selection = isinstance(problem, Selection)
        if self.is_selection:
            self.p = problem.p
        else:
            self.parts = [list(part) for part in problem.parts]
            self.part_of = problem.part_of()
        # open items are branched on in order of increasing first-stage cost
        self.order = sorted(range(n), key=lambda i: (cl[i] + self.dc[i], cl[i], i))

    # -- bound -------------------------------------------------------------

    def bound(self, status: np.ndarray, xs: list[int]):
        """Lower bound on Adv over the subtree (exact when nothing is open)."""
        is_open = status == _OPEN
        W = np.where(is_open, self.U, np.where(status == _OUT, self.D, self.big))
        if self.is_selection:
            m = self.p - len(xs)
            if m == 0:
                compl = np.zeros(len(self.P), dtype=self.P.dtype)
            else:
                avail = int(np.count_nonzero(is_open | (status == _OUT)))
                if avail < m:
                    return INF
                compl = np.partition(W, m - 1, axis=1)[:, :m].sum(axis=1)
        else:
            compl = np.zeros(len(self.P), dtype=self.P.dtype)
            covered = {self.part_of[i] for i in xs}
            for j, cols in enumerate(self.parts):
                if j not in covered:
                    compl = compl + W[:, cols].min(axis=1)
        base = sum(self.cl[i] for i in xs)
        incs = sorted((self.dc[i] for i in xs), reverse=True)
        # row g: adversary spends g units on x, the rest on the completion
        splits = min(self.gamma, len(xs)) + 1
        tops = np.array([0] + list(itertools.accumulate(incs[: splits - 1])), dtype=self.P.dtype)
        left = np.array(range(self.gamma, self.gamma - splits, -1), dtype=self.P.dtype)
        rest = (left[:, None] * self.P[None, :] + compl[None, :]).min(axis=1)
        return base + int((tops + rest).max())

    # -- search ------------------------------------------------------------

    def run(self, incumbent: Optional[tuple]):
        """Return ``(scaled value, x)`` of the optimum, tie-broken by key."""
        n = self.n
        status = np.full(n, _OPEN, dtype=np.int8)
        self.best = incumbent  # (value, key, x)
        self._dfs(status, [], 0)
        if self.best is None:
            raise Infeasible("the nominal problem has no feasible solution")
        return self.best[0], self.best[2]

    def evaluate_leaf(self, x: ItemSet):
        status = np.full(self.n, _OUT, dtype=np.int8)
        for i in x:
            status[i] = _IN
        if not self.is_selection:
            for i in x:
                for k in self.parts[self.part_of[i]]:
                    if k != i:
                        status[k] = _BLOCKED
        return self.bound(status, sorted(x))

    def _offer(self, value, xs):
        x = frozenset(xs)
        key = _key(x)
        if self.best is None or value < self.best[0] or (
            value == self.best[0] and key < self.best[1]
        ):
            self.best = (value, key, x)

    def _dfs(self, status, xs, pos):
        self.nodes += 1
        if self.deadline is not None and (self.nodes & 255) == 0:
            if time.perf_counter() > self.deadline:
                raise TimeLimitExceeded("discrete search hit its time limit")
        while pos < self.n and status[self.order[pos]] != _OPEN:
            pos += 1
        full = self.is_selection and len(xs) == self.p
        if pos == self.n or full:
            saved = status.copy()
            status[status == _OPEN] = _OUT
            value = self.bound(status, xs)
            status[:] = saved
            if value != INF:
                self._offer(value, xs)
            return
        lb = self.bound(status, xs)
        if lb == INF or (self.best is not None and lb > self.best[0]):
            return
        j = self.order[pos]
        # branch 1: j stays out of the first stage
        status[j] = _OUT
        self._dfs(status, xs, pos + 1)
        # branch 2: j is bought up front
        status[j] = _IN
        blocked = []
        if not self.is_selection:
            for k in self.parts[self.part_of[j]]:
                if k != j and status[k] != _BLOCKED:
                    blocked.append((k, status[k]))
                    status[k] = _BLOCKED
        xs.append(j)
        self._dfs(status, xs, pos + 1)
        xs.pop()
        for k, old in blocked:
            status[k] = old
        status[j] = _OPEN


def _saturated(instance: Instance) -> bool:
    """Budget covers every item any nominal solution can contain."""
    return instance.gamma >= instance.nominal.solution_size


def _unique_solution(instance: Instance) -> bool:
    problem = instance.nominal
    if isinstance(problem, Selection):
        return problem.p == problem.n
    return all(len(part) == 1 for part in problem.parts)


def solve_discrete_exact(
    instance: Instance,
    warm_start: bool = True,
    time_limit: Optional[float] = None,
    fast_paths: bool = True,
) -> SolveReport:
    """Optimal two-stage value under a discrete budget (R2D).

    ``warm_start`` seeds the search with the static one-stage solution.
    ``fast_paths`` enables two exact shortcuts: a budget that can hit every
    purchased item (value = nominal at ``min(c_hi, d_hi)``) and a nominal
    problem with a single solution (the recourse has no choice, so the value
    equals the static one).
    """
    _require_discrete(instance)
    started = time.perf_counter()
    deadline = None if time_limit is None else started + time_limit
    costs = instance.costs
    with stopwatch() as ms:
        provenance: dict = {}
        if fast_paths and _saturated(instance):
            weights = [min(c, d) for c, d in zip(costs.c_hi, costs.d_hi)]
            value, z = nominal_solve(instance.nominal, weights)
            x = frozenset(i for i in z if costs.c_hi[i] <= costs.d_hi[i])
            provenance = {"fast_path": "saturated_budget"}
        elif fast_paths and _unique_solution(instance):
            rep = static_solve(instance)
            value, x = rep.value, rep.witness_x
            provenance = {"fast_path": "unique_nominal_solution"}
        else:
            search = _Search(instance, deadline)
            incumbent = None
            if warm_start:
                x0 = static_solve(instance).witness_x
                v0 = search.evaluate_leaf(x0)
                if v0 != INF:
                    incumbent = (v0, _key(x0), x0)
                    provenance["warm_start"] = x0
            scaled, x = search.run(incumbent)
            value = Fraction(scaled) / search.scale
            provenance["nodes"] = search.nodes
    _, split = _adv_scaled(instance.nominal, _Scaled.of(instance), instance.int_gamma, x)
    provenance["attack"] = {
        "gamma1": split.gamma1,
        "stage1": split.stage1,
        "stage2": split.stage2,
        "completion": split.completion,
    }
    return SolveReport(
        value=Fraction(value),
        witness_x=x,
        method="discrete",
        provenance=provenance,
        millis=ms[0],
    )


def solve_discrete_enumerate(instance: Instance) -> SolveReport:
    """Reference path: evaluate ``adv_discrete`` on every admissible first stage."""
    from .model import first_stage_candidates

    _require_discrete(instance)
    with stopwatch() as ms:
        best = None
        for x in first_stage_candidates(instance.nominal):
            value, _ = adv_discrete(instance, x)
            if value == INF:
                continue
            if best is None or value < best[0]:
                best = (value, x)
    if best is None:
        raise Infeasible("the nominal problem has no feasible solution")
    return SolveReport(best[0], best[1], "discrete_enumerate", millis=ms[0])


# ---------------------------------------------------------------------------
# Equal stage costs, budget one
# ---------------------------------------------------------------------------


def _equal_cost_selection(pi0, pi1, inc, c_lo, p: int):
    n = len(c_lo)
    cls = {}
    for i in range(n):
        bad_y0, bad_x = inc[i] > pi0, inc[i] > pi1
        cls[i] = {(True, True): "A", (False, False): "B", (True, False): "C", (False, True): "D"}[
            (bad_y0, bad_x)
        ]
    rank = {"A": 0, "B": 1, "C": 2, "D": 2}

    def keyf(i):
        return (c_lo[i], rank[cls[i]], i)

    group = {name: sorted((i for i in range(n) if cls[i] == name), key=keyf) for name in "ABCD"}
    A, B, C, D = group["A"], group["B"], group["C"], group["D"]

    # x only ever takes a cheapest prefix of each class it may use:
    # B always, C as well when pi0 < pi1 (A is forbidden, D useless up front)
    c_counts = range(len(C) + 1) if pi0 < pi1 else (0,)
    best = None
    for nc in c_counts:
        rest_c = C[nc:]
        for nb in range(len(B) + 1):
            s = nb + nc
            if s > p:
                break
            m = p - s
            y0_pool = sorted(B[nb:] + D, key=keyf)
            y1_pool = sorted(A + B[nb:] + rest_c + D, key=keyf)
            if m > len(y0_pool) or m > len(y1_pool):
                continue
            x = B[:nb] + C[:nc]
            value = sum(c_lo[i] for i in x) + max(
                pi0 + sum(c_lo[i] for i in y0_pool[:m]),
                pi1 + sum(c_lo[i] for i in y1_pool[:m]),
            )
            if best is None or value < best[0]:
                best = (value, frozenset(x))
    return best


def _equal_cost_repsel(pi0, pi1, inc, c_lo, parts):
    u = v = 0
    x = set()
    for part in parts:
        items = sorted(part, key=lambda i: (c_lo[i], i))
        first = items[0]
        x_ok = {i: inc[i] <= pi1 for i in items}
        y0_ok = {i: inc[i] <= pi0 for i in items}
        if x_ok[first]:
            x.add(first)
            du = dv = c_lo[first]
        elif y0_ok[first]:
            du = dv = c_lo[first]
        elif len(items) == 2 and y0_ok[items[1]]:
            du, dv = c_lo[items[1]], c_lo[first]
        elif len(items) == 2 and x_ok[items[1]]:
            x.add(items[1])
            du = dv = c_lo[items[1]]
        else:
            return None
        u += du
        v += dv
    return max(pi0 + u, pi1 + v), frozenset(x)


def solve_equal_costs_gamma1(instance: Instance) -> SolveReport:
    """Polynomial algorithm for budget one with identical stage costs.

    Every pair of thresholds ``(pi0, pi1)`` from the increment values fixes
    which items may be bought in the first stage (increment <= pi1) and which
    may be used in the completion facing a stage-two attack (increment <= pi0);
    each such subproblem is solved by sorted packing per item class.
    """
    _require_discrete(instance)
    costs = instance.costs
    if instance.gamma != 1:
        raise PreconditionViolated("equal-cost routine needs a budget of exactly 1")
    if costs.c_lo != costs.d_lo or costs.c_hi != costs.d_hi:
        raise PreconditionViolated("equal-cost routine needs identical stage costs")
    problem = instance.nominal
    if isinstance(problem, RepSelection) and any(len(part) > 2 for part in problem.parts):
        raise PreconditionViolated("representative selection needs parts of size <= 2")
    scale, (c_lo, c_hi, _, _) = scaled_integers(costs)
    inc = [h - l for l, h in zip(c_lo, c_hi)]
    values = sorted(set(inc) | {0})
    with stopwatch() as ms:
        best = None
        for pi0 in values:
            for pi1 in values:
                if isinstance(problem, Selection):
                    res = _equal_cost_selection(pi0, pi1, inc, c_lo, problem.p)
                else:
                    res = _equal_cost_repsel(pi0, pi1, inc, c_lo, problem.parts)
                if res is None:
                    continue
                if best is None or res[0] < best[0]:
                    best = (res[0], res[1], pi0, pi1)
    if best is None:
        raise Infeasible("the nominal problem has no feasible solution")
    value, x, pi0, pi1 = best
    sub = EqualCostSubproblem(Fraction(pi0, scale), Fraction(pi1, scale), costs.c_inc)
    return SolveReport(
        value=Fraction(value, scale),
        witness_x=x,
        method="equalcost",
        provenance={
            "pi0": sub.pi0,
            "pi1": sub.pi1,
            "forbidden_x": sub.forbidden_x,
            "forbidden_y0": sub.forbidden_y0,
            "subproblems": len(values) ** 2,
        },
        millis=ms[0],
    )
