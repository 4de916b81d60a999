"""Closed-form solver for the absolute-budget variant.

The adversary gains nothing by holding budget back for the second stage, so
the robust value is the cheaper of two nominal problems: lower costs plus the
full budget, or upper costs with no budget left to matter.
"""

from __future__ import annotations

from .errors import PreconditionViolated
from .model import Instance, Kind, nominal_solve
from .report import SolveReport, stopwatch


def solve_variant(instance: Instance) -> SolveReport:
    if instance.kind is not Kind.VARIANT:
        raise PreconditionViolated("solve_variant needs a variant-budget instance")
    costs = instance.costs
    with stopwatch() as ms:
        lower = [min(c, d) for c, d in zip(costs.c_lo, costs.d_lo)]
        upper = [min(c, d) for c, d in zip(costs.c_hi, costs.d_hi)]
        low_value, low_z = nominal_solve(instance.nominal, lower)
        low_value += instance.gamma
        up_value, up_z = nominal_solve(instance.nominal, upper)
    # ties go to the upper branch: its value involves no attack at all
    if up_value <= low_value:
        value, z, branch = up_value, up_z, "upper"
        x = frozenset(i for i in z if costs.c_hi[i] <= costs.d_hi[i])
    else:
        value, z, branch = low_value, low_z, "lower_plus_gamma"
        x = frozenset(i for i in z if costs.c_lo[i] <= costs.d_lo[i])
    return SolveReport(
        value=value,
        witness_x=x,
        method="variant",
        provenance={"branch": branch, "solution": z},
        millis=ms[0],
    )
