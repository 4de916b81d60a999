"""LP-format export of the compact two-stage model and the static model.

Models are first built as plain data (:class:`MilpModel`) and then rendered.
All coefficients are multiplied by the LCM of the cost denominators so the
file holds integers only; the scale is written into the header comment and
the optimum of the file divided by it is the robust value.
See ``docs/lp-format.md`` for the naming scheme and row groups.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import UnsupportedKind
from ..model import Instance, Kind, RepSelection, Selection, scaled_integers

TERMS_PER_LINE = 8


@dataclass(frozen=True)
class Row:
    name: str
    group: str
    terms: tuple[tuple[int, str], ...]  # (coefficient, variable)
    sense: str  # one of "<=", ">=", "="
    rhs: int


@dataclass
class MilpModel:
    objective: list[tuple[int, str]]
    rows: list[Row] = field(default_factory=list)
    binaries: list[str] = field(default_factory=list)
    continuous: list[str] = field(default_factory=list)
    free: list[str] = field(default_factory=list)
    scale: int = 1
    title: str = ""

    def add(self, name, group, terms, sense, rhs=0):
        terms = tuple((c, v) for c, v in terms if c != 0)
        self.rows.append(Row(name, group, terms, sense, rhs))

    def group_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for row in self.rows:
            counts[row.group] = counts.get(row.group, 0) + 1
        return counts

    @property
    def variables(self) -> list[str]:
        return self.binaries + self.continuous + self.free


def _nominal_rows(model: MilpModel, problem, first: list[str], second: list[str], tag: str):
    """Rows forcing ``first + second`` to be a nominal solution."""
    if isinstance(problem, Selection):
        terms = [(1, v) for v in first] + [(1, v) for v in second]
        model.add(f"nom{tag}", "nominal", terms, "=", problem.p)
    else:
        for j, part in enumerate(problem.parts):
            terms = [(1, first[i]) for i in part] + [(1, second[i]) for i in part]
            model.add(f"nom{tag}_{j + 1}", "nominal", terms, "=", 1)


def build_two_stage(instance: Instance) -> MilpModel:
    if instance.kind is not Kind.DISCRETE:
        raise UnsupportedKind("the compact two-stage model needs a discrete budget")
    scale, (cl, ch, dl, dh) = scaled_integers(instance.costs)
    n, gamma = instance.n, instance.int_gamma
    xs = [f"x_{i + 1}" for i in range(n)]
    model = MilpModel(objective=[(1, "t")], scale=scale, title="two-stage discrete budget")
    model.binaries += xs
    model.free.append("t")
    for g in range(gamma + 1):
        ys = [f"y_{g}_{i + 1}" for i in range(n)]
        rho = [f"rho_{g}_{i + 1}" for i in range(n)]
        rho2 = [f"rho2_{g}_{i + 1}" for i in range(n)]
        pi, kappa = f"pi_{g}", f"kappa_{g}"
        model.binaries += ys
        model.continuous += [pi, kappa] + rho + rho2
        # t covers the adversary's payoff when it spends g units in stage one
        terms = [(1, "t"), (-(gamma - g), kappa)]
        terms += [(-1, v) for v in rho2]
        terms += [(-dl[i], ys[i]) for i in range(n)]
        terms += [(-g, pi)]
        terms += [(-1, v) for v in rho]
        terms += [(-cl[i], xs[i]) for i in range(n)]
        model.add(f"worst_{g}", "worst_case", terms, ">=")
        _nominal_rows(model, instance.nominal, xs, ys, f"_{g}")
        for i in range(n):
            model.add(f"disjoint_{g}_{i + 1}", "disjoint", [(1, xs[i]), (1, ys[i])], "<=", 1)
        for i in range(n):
            model.add(
                f"dual2_{g}_{i + 1}",
                "second_stage_dual",
                [(1, kappa), (1, rho2[i]), (-(dh[i] - dl[i]), ys[i])],
                ">=",
            )
        for i in range(n):
            model.add(
                f"dual1_{g}_{i + 1}",
                "first_stage_dual",
                [(1, pi), (1, rho[i]), (-(ch[i] - cl[i]), xs[i])],
                ">=",
            )
    return model


def build_static(instance: Instance) -> MilpModel:
    if instance.kind is Kind.VARIANT:
        raise UnsupportedKind("the static model covers continuous and discrete budgets")
    scale, (cl, ch, dl, dh) = scaled_integers(instance.costs)
    n = instance.n
    # a fractional budget is cleared by multiplying the objective by its denominator
    den = instance.gamma.denominator
    xs = [f"x_{i + 1}" for i in range(n)]
    ys = [f"y_{i + 1}" for i in range(n)]
    rho = [f"rho_{i + 1}" for i in range(n)]
    objective = [(den * cl[i], xs[i]) for i in range(n)] + [(den * dl[i], ys[i]) for i in range(n)]
    objective.append((instance.gamma.numerator, "pi"))
    objective += [(den, v) for v in rho]
    model = MilpModel(objective=objective, scale=scale * den, title="static one-stage")
    model.binaries += xs + ys
    model.continuous += ["pi"] + rho
    _nominal_rows(model, instance.nominal, xs, ys, "")
    for i in range(n):
        model.add(
            f"dual_{i + 1}",
            "dual",
            [(1, "pi"), (1, rho[i]), (-(ch[i] - cl[i]), xs[i]), (-(dh[i] - dl[i]), ys[i])],
            ">=",
        )
    for i in range(n):
        model.add(f"disjoint_{i + 1}", "disjoint", [(1, xs[i]), (1, ys[i])], "<=", 1)
    return model


def _expression(terms) -> list[str]:
    """Render terms as ``+ 3 x_1 - y_0_2`` chunks, a few terms per line."""
    pieces = []
    for k, (coef, var) in enumerate(terms):
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        body = var if mag == 1 else f"{mag} {var}"
        pieces.append(body if (k == 0 and sign == "+") else f"{sign} {body}")
    if not pieces:
        pieces = ["0"]
    return [
        " ".join(pieces[k : k + TERMS_PER_LINE]) for k in range(0, len(pieces), TERMS_PER_LINE)
    ]


def render_lp(model: MilpModel) -> str:
    lines = [
        f"\\ {model.title}",
        f"\\ coefficients scaled by {model.scale}: robust value = objective / {model.scale}",
        "Minimize",
    ]
    obj = _expression(model.objective)
    lines.append(f" obj: {obj[0]}")
    lines += [f"   {chunk}" for chunk in obj[1:]]
    lines.append("Subject To")
    for row in model.rows:
        expr = _expression(row.terms)
        if len(expr) == 1:
            lines.append(f" {row.name}: {expr[0]} {row.sense} {row.rhs}")
        else:
            lines.append(f" {row.name}: {expr[0]}")
            lines += [f"   {chunk}" for chunk in expr[1:-1]]
            lines.append(f"   {expr[-1]} {row.sense} {row.rhs}")
    lines.append("Bounds")
    lines += [f" {v} free" for v in model.free]
    lines += [f" {v} >= 0" for v in model.continuous]
    lines.append("Binaries")
    for k in range(0, len(model.binaries), TERMS_PER_LINE):
        lines.append(" " + " ".join(model.binaries[k : k + TERMS_PER_LINE]))
    lines.append("End")
    return "\n".join(lines) + "\n"


def emit_milp(instance: Instance, which: str = "two_stage") -> str:
    """LP-format text of the compact two-stage model or the static model."""
    if which == "two_stage":
        return render_lp(build_two_stage(instance))
    if which == "static":
        return render_lp(build_static(instance))
    raise ValueError(f"unknown model {which!r}; expected 'two_stage' or 'static'")
