"""Single-stage budgeted machinery: threshold sets, attacks, the static solver."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import NegativeIncrement, UnsupportedKind
from .model import (
    Instance,
    Kind,
    NominalProblem,
    Number,
    as_fraction,
    nominal_solve,
    positive_part,
    scaled_integers,
)
from .report import SolveReport, stopwatch


@dataclass(frozen=True)
class ThresholdSet:
    """Sorted candidate dual values; 0 is always a member."""

    values: tuple[Fraction, ...]

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, k: int) -> Fraction:
        return self.values[k]

    def __contains__(self, value) -> bool:
        return value in self.values


def pi_candidates(increments: Iterable[Number]) -> ThresholdSet:
    values = {Fraction(0)}
    for k, inc in enumerate(increments):
        inc = as_fraction(inc)
        if inc < 0:
            raise NegativeIncrement(f"increment {inc} at i={k + 1}")
        values.add(inc)
    return ThresholdSet(tuple(sorted(values)))


def attack_value(
    base: Sequence[Number],
    increments: Sequence[Number],
    budget: Number,
    mode: str = "discrete",
) -> Fraction:
    """Worst-case cost of a fixed item set under a single budgeted attack.

    ``mode="continuous"`` is the fractional knapsack: the floor(budget) largest
    increments in full plus the fractional remainder of the next one.
    """
    budget = as_fraction(budget)
    if mode == "discrete" and budget.denominator != 1:
        raise ValueError("discrete attacks need an integer budget")
    total = sum(base, Fraction(0))
    ranked = sorted(increments, reverse=True)
    whole = min(int(budget), len(ranked))
    total += sum(ranked[:whole], Fraction(0))
    if mode == "continuous" and whole < len(ranked):
        total += (budget - int(budget)) * ranked[whole]
    elif mode not in ("discrete", "continuous"):
        raise ValueError(f"unknown attack mode {mode!r}")
    return total


def robust_nominal(
    problem: NominalProblem,
    lo: Sequence[Number],
    hi: Sequence[Number],
    gamma: Number,
) -> tuple[Fraction, frozenset]:
    """Classic one-vector min-max: ``min_z max_attack`` via O(n) nominal solves."""
    gamma = as_fraction(gamma)
    incs = [h - l for l, h in zip(lo, hi)]
    best = None
    for pi in pi_candidates(incs):
        weights = [l + positive_part(inc - pi) for l, inc in zip(lo, incs)]
        value, z = nominal_solve(problem, weights)
        value += gamma * pi
        if best is None or value < best[0]:
            best = (value, z)
    return best


def static_solve(instance: Instance) -> SolveReport:
    """One-stage value R1: the whole solution is fixed before any attack.

    Each item is bought either in the first stage (c-costs) or in the second
    (d-costs); a single budget covers both increment vectors, so the threshold
    candidates are the union of both increment sets.
    """
    if instance.kind is Kind.VARIANT:
        raise UnsupportedKind("static_solve covers the continuous and discrete kinds")
    gamma = instance.gamma
    with stopwatch() as ms:
        # integer arithmetic on scaled costs; divided back once at the end
        scale, (cl, ch, dl, dh) = scaled_integers(instance.costs)
        c_inc = [h - l for l, h in zip(cl, ch)]
        d_inc = [h - l for l, h in zip(dl, dh)]
        best = None
        for pi in sorted(set(c_inc) | set(d_inc) | {0}):
            c_w = [l + max(inc - pi, 0) for l, inc in zip(cl, c_inc)]
            d_w = [l + max(inc - pi, 0) for l, inc in zip(dl, d_inc)]
            value, z = nominal_solve(instance.nominal, [min(a, b) for a, b in zip(c_w, d_w)])
            value += gamma * pi
            if best is None or value < best[0]:
                x = frozenset(i for i in z if c_w[i] <= d_w[i])
                best = (value, x, z, pi)
    value, x, z, pi = best
    return SolveReport(
        value=Fraction(value) / scale,
        witness_x=x,
        method="static",
        provenance={"pi": Fraction(pi, scale), "y": z - x},
        millis=ms[0],
    )
