"""Exact solver for two-stage continuous budgets by decomposition.

The robust value is the minimum over two families of subproblems:

* single-threshold subproblems, one per (second-stage threshold, first-stage
  threshold) pair, each a nominal problem with per-item weight
  ``min(c_i, d_i)`` plus a constant;
* two-threshold subproblems, one per admissible tuple
  ``(k1, k2, forced item, first-stage threshold)``, each a coordination
  problem ``min a.x + b.y1 + c.y2 + v`` with ``x + y1`` and ``x + y2`` both
  nominal solutions (see :func:`solve_type8`).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .errors import Infeasible, PreconditionViolated
from .model import (
    Instance,
    ItemSet,
    Kind,
    NominalProblem,
    RepSelection,
    Selection,
    nominal_solve,
    positive_part,
)
from .onestage import pi_candidates
from .report import SolveReport, stopwatch

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SingleZSubproblem:
    k: int
    pi2: Fraction
    pi1: Fraction
    constant: Fraction  # Gamma * (pi2 + pi1)
    c_weights: tuple[Fraction, ...]
    d_weights: tuple[Fraction, ...]


@dataclass(frozen=True)
class TypeEightProblem:
    a: tuple[Fraction, ...]
    b: tuple[Fraction, ...]
    c: tuple[Fraction, ...]
    v: Fraction
    forced_item: Optional[int]
    provenance: tuple = ()
    w1: Fraction = Fraction(1)
    w2: Fraction = Fraction(0)


def _require_continuous(instance: Instance):
    if instance.kind is not Kind.CONTINUOUS:
        raise PreconditionViolated("continuous decomposition needs a continuous instance")
    costs = instance.costs
    if any(v < 0 for vec in (costs.c_lo, costs.c_hi, costs.d_lo, costs.d_hi) for v in vec):
        raise PreconditionViolated("continuous decomposition needs nonnegative costs")


def enumerate_single_z(instance: Instance) -> list[SingleZSubproblem]:
    _require_continuous(instance)
    costs, gamma = instance.costs, instance.gamma
    c_inc, d_inc = costs.c_inc, costs.d_inc
    out = []
    for k, pi2 in enumerate(pi_candidates(d_inc)):
        d_w = tuple(l + positive_part(inc - pi2) for l, inc in zip(costs.d_lo, d_inc))
        seen = set()
        for pi1 in [inc - pi2 for inc in c_inc] + [Fraction(0)]:
            if pi1 < 0 or pi1 in seen:
                continue
            seen.add(pi1)
            c_w = tuple(
                l + positive_part(inc - pi1 - pi2) for l, inc in zip(costs.c_lo, c_inc)
            )
            out.append(SingleZSubproblem(k, pi2, pi1, gamma * (pi2 + pi1), c_w, d_w))
    return out


def enumerate_pair_z(instance: Instance) -> list[TypeEightProblem]:
    _require_continuous(instance)
    costs, gamma = instance.costs, instance.gamma
    c_inc, d_inc = costs.c_inc, costs.d_inc
    pis = pi_candidates(d_inc)
    d_at = [
        tuple(l + positive_part(inc - pi) for l, inc in zip(costs.d_lo, d_inc)) for pi in pis
    ]
    out = []
    for k1, hi in enumerate(pis):
        for k2, lo in enumerate(pis):
            if hi <= lo:
                continue
            for forced, inc_f in enumerate(c_inc):
                a = tuple(
                    l + positive_part(inc - inc_f) for l, inc in zip(costs.c_lo, c_inc)
                )
                seen = set()
                for pi1 in (inc_f - lo, inc_f - hi, Fraction(0)):
                    if pi1 in seen:
                        continue
                    seen.add(pi1)
                    if pi1 < 0 or inc_f - pi1 - lo < 0 or hi - inc_f + pi1 < 0:
                        continue
                    w1 = (inc_f - pi1 - lo) / (hi - lo)
                    w2 = 1 - w1
                    out.append(
                        TypeEightProblem(
                            a=a,
                            b=tuple(w * w1 for w in d_at[k1]),
                            c=tuple(w * w2 for w in d_at[k2]),
                            v=gamma * inc_f,
                            forced_item=forced,
                            provenance=(k1, k2, forced, pi1),
                            w1=w1,
                            w2=w2,
                        )
                    )
    return out


# ---------------------------------------------------------------------------
# Coordination subproblems
# ---------------------------------------------------------------------------


def _item_options(problem: TypeEightProblem, i: int):
    """Cost of item ``i`` for each membership pattern (in z1, in z2)."""
    a, b, c = problem.a[i], problem.b[i], problem.c[i]
    if i == problem.forced_item:
        return {(True, True): a}
    return {
        (False, False): Fraction(0),
        (True, False): b,
        (False, True): c,
        (True, True): min(a, b + c),
    }


def _selection_type8(problem: TypeEightProblem, nominal: Selection):
    # DP over items; state = (|z1|, |z2|) so far
    p = nominal.p
    layers = [{(0, 0): (Fraction(0), None)}]
    for i in range(nominal.n):
        opts = _item_options(problem, i)
        nxt: dict = {}
        for (s1, s2), (cost, _) in layers[-1].items():
            for (in1, in2), w in opts.items():
                key = (s1 + in1, s2 + in2)
                if key[0] > p or key[1] > p:
                    continue
                total = cost + w
                if key not in nxt or total < nxt[key][0]:
                    nxt[key] = (total, (s1, s2, in1, in2))
        layers.append(nxt)
    if (p, p) not in layers[-1]:
        raise Infeasible("no pair of nominal solutions contains the forced item")
    value = layers[-1][(p, p)][0]
    z1, z2 = set(), set()
    state = (p, p)
    for i in range(nominal.n, 0, -1):
        _, back = layers[i][state]
        s1, s2, in1, in2 = back
        if in1:
            z1.add(i - 1)
        if in2:
            z2.add(i - 1)
        state = (s1, s2)
    return value, frozenset(z1), frozenset(z2)


def _repsel_type8(problem: TypeEightProblem, nominal: RepSelection):
    value = Fraction(0)
    z1, z2 = set(), set()
    for part in nominal.parts:
        if problem.forced_item in part:
            pairs = [(problem.forced_item, problem.forced_item)]
        else:
            pairs = [(i, j) for i in part for j in part]
        best = None
        for i, j in pairs:
            if i == j:
                cost = _item_options(problem, i)[(True, True)]
            else:
                cost = problem.b[i] + problem.c[j]
            if best is None or cost < best[0]:
                best = (cost, i, j)
        value += best[0]
        z1.add(best[1])
        z2.add(best[2])
    return value, frozenset(z1), frozenset(z2)


def solve_type8(problem: TypeEightProblem, nominal: NominalProblem):
    """Exact minimum of ``a.x + b.y1 + c.y2 + v`` over coordinated solutions.

    With ``z1 = x + y1`` and ``z2 = x + y2`` the cost splits per item into
    four membership patterns; an item in both ``z1`` and ``z2`` costs
    ``min(a, b + c)`` (bought up front or twice later). Selection is solved
    by a DP over ``(|z1|, |z2|)``, representative selection part by part.

    Returns ``(value, x, y1, y2)``.
    """
    if isinstance(nominal, Selection):
        value, z1, z2 = _selection_type8(problem, nominal)
    else:
        value, z1, z2 = _repsel_type8(problem, nominal)
    x = {i for i in z1 & z2 if problem.a[i] < problem.b[i] + problem.c[i]}
    if problem.forced_item is not None:
        x.add(problem.forced_item)
    x = frozenset(x)
    return value + problem.v, x, z1 - x, z2 - x


# ---------------------------------------------------------------------------
# Full solver
# ---------------------------------------------------------------------------


def iter_subproblem_values(instance: Instance) -> Iterator[tuple[str, tuple, Fraction, ItemSet]]:
    """Yield ``(family, provenance, value, witness_x)`` for every subproblem."""
    nominal = instance.nominal
    for sub in enumerate_single_z(instance):
        weights = [min(cw, dw) for cw, dw in zip(sub.c_weights, sub.d_weights)]
        try:
            value, z = nominal_solve(nominal, weights)
        except Infeasible:
            continue
        x = frozenset(i for i in z if sub.c_weights[i] <= sub.d_weights[i])
        yield "single", (sub.k, sub.pi1), value + sub.constant, x
    for prob in enumerate_pair_z(instance):
        try:
            value, x, _, _ = solve_type8(prob, nominal)
        except Infeasible:
            continue
        yield "pair", prob.provenance, value, x


def solve_continuous(instance: Instance, trace=None) -> SolveReport:
    """Robust value under a continuous two-stage budget.

    ``trace`` (a writable text stream) receives one CSV line per subproblem:
    ``family,k_or_k1,k2,item,pi1,value`` with 1-based item indices.
    """
    _require_continuous(instance)
    with stopwatch() as ms:
        best = None
        count = 0
        for family, prov, value, x in iter_subproblem_values(instance):
            count += 1
            if trace is not None:
                if family == "single":
                    k, pi1 = prov
                    trace.write(f"single,{k + 1},,,{pi1},{value}\n")
                else:
                    k1, k2, item, pi1 = prov
                    trace.write(f"pair,{k1 + 1},{k2 + 1},{item + 1},{pi1},{value}\n")
            # strict improvement keeps the first subproblem in enumeration order
            if best is None or value < best[0]:
                best = (value, x, family, prov)
    if best is None:
        raise Infeasible("the nominal problem has no feasible solution")
    value, x, family, prov = best
    log.debug("continuous decomposition: %d subproblems, best %s", count, value)
    if family == "single":
        provenance = {"family": "single", "k": prov[0] + 1, "pi1": prov[1]}
    else:
        provenance = {
            "family": "pair",
            "k1": prov[0] + 1,
            "k2": prov[1] + 1,
            "forced_item": prov[2] + 1,
            "pi1": prov[3],
        }
    provenance["subproblems"] = count
    return SolveReport(
        value=value, witness_x=x, method="continuous", provenance=provenance, millis=ms[0]
    )
