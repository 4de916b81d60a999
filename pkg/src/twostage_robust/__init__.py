"""Exact solvers for two-stage robust selection under budgeted uncertainty."""

from .cont_decomp import solve_continuous, solve_type8
from .disc_exact import (
    adv_discrete,
    rec_discrete,
    solve_discrete_exact,
    solve_equal_costs_gamma1,
)
from .errors import (
    CapExceeded,
    Infeasible,
    NegativeIncrement,
    NonpositiveDenominator,
    ParseError,
    PreconditionViolated,
    RobustError,
    SchemaError,
    TimeLimitExceeded,
    UnsupportedKind,
)
from .model import (
    CostProfile,
    Instance,
    Kind,
    RepSelection,
    Selection,
    nominal_solve,
    read_instance,
    validate,
    write_instance,
)
from .onestage import attack_value, pi_candidates, static_solve
from .report import SolveReport
from .variant_budget import solve_variant

__version__ = "0.1.0"
