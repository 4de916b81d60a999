"""Partition gadgets: instances whose robust optimum encodes a partition imbalance.

With ``A`` half the total weight:

* ``gadget_repsel`` has optimum ``min_X |sum_X a - sum_rest a|``;
* ``gadget_selection`` has optimum ``2A + min_X max(sum_X a, sum_rest a)``.

Both use a budget of one. The penalty constants are ``M = 8A`` and ``M = 4A``.

For the representative selection gadget ``M = 2A + 1`` is not enough: with
nothing bought up front the recourse can take every second item at ``-3a``
and the single unit of budget only penalizes one of them, giving
``-6A + M < 0``. Any recourse that uses second items on a set ``S`` of parts
costs at least ``-3 a(S) + M``, which never beats the first items' ``a(S)``
once ``M >= 4 * 2A``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from ..model import CostProfile, Instance, Kind, RepSelection, Selection


def _half_total(weights: Sequence[int]) -> Fraction:
    if not weights:
        raise ValueError("weights must be nonempty")
    if any(int(a) != a or a <= 0 for a in weights):
        raise ValueError("weights must be positive integers")
    return Fraction(sum(weights), 2)


def gadget_repsel(weights: Sequence[int], shift=0) -> Instance:
    """Representative selection gadget, one two-item part per weight.

    Every cost is raised by ``shift``; since each solution holds exactly
    ``len(weights)`` items the optimum rises by ``len(weights) * shift``.
    ``signed_costs`` is set only when some cost remains negative.
    """
    A = _half_total(weights)
    big = 8 * A
    shift = Fraction(shift)
    c_lo, c_hi, d_lo, d_hi = [], [], [], []
    for a in weights:
        # first item: cheap certain recourse; second item: cheaper but attackable
        for dl, dinc in ((a, 0), (-3 * a, big)):
            c_lo.append(-a + shift)
            c_hi.append(-a + 4 * A + shift)
            d_lo.append(dl + shift)
            d_hi.append(dl + dinc + shift)
    parts = tuple((2 * j, 2 * j + 1) for j in range(len(weights)))
    costs = CostProfile(c_lo, c_hi, d_lo, d_hi)
    signed = any(v < 0 for v in costs.c_lo + costs.d_lo)
    return Instance(RepSelection(parts), costs, 1, Kind.DISCRETE, signed_costs=signed)


def gadget_selection(weights: Sequence[int]) -> Instance:
    """Selection gadget with ``2n + 1`` items and ``p = n + 1``.

    Items ``1..n`` carry the weights (first stage ``a``, recourse ``2a``, no
    uncertainty), item ``n + 1`` is free up front but attackable by ``2A``,
    and items ``n + 2..2n + 1`` are free in the recourse only if not attacked.
    """
    A = _half_total(weights)
    big = 4 * A
    n = len(weights)
    c_lo = [Fraction(a) for a in weights] + [Fraction(0)] + [big] * n
    c_hi = [Fraction(a) for a in weights] + [2 * A] + [big] * n
    d_lo = [Fraction(2 * a) for a in weights] + [big] + [Fraction(0)] * n
    d_hi = [Fraction(2 * a) for a in weights] + [big] + [big] * n
    return Instance(
        Selection(2 * n + 1, n + 1), CostProfile(c_lo, c_hi, d_lo, d_hi), 1, Kind.DISCRETE
    )


def subset_sums(weights: Sequence[int]) -> set[int]:
    """All achievable subset sums (bitset DP)."""
    reach = 1
    for a in weights:
        reach |= reach << int(a)
    return {s for s in range(sum(weights) + 1) if reach >> s & 1}


def min_partition_difference(weights: Sequence[int]) -> int:
    total = sum(weights)
    return min(abs(total - 2 * s) for s in subset_sums(weights))


def min_max_side(weights: Sequence[int]) -> int:
    total = sum(weights)
    return min(max(s, total - s) for s in subset_sums(weights))
