"""Instances, nominal problems and their (de)serialization.

Item indices are 0-based inside the package. Everything that leaves the
process (JSON instances, solve reports, LP exports, log lines) uses 1-based
indices.
"""

from __future__ import annotations

import enum
import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

from .errors import Infeasible, ParseError, SchemaError

Number = Union[int, Fraction]
ItemSet = frozenset  # frozenset[int] of 0-based item indices

INF = math.inf


def as_fraction(value) -> Fraction:
    """Parse an int, a "num/den" string or a decimal literal exactly."""
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # JSON floats: go through repr so 0.1 stays 1/10
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational")


def format_rational(value: Fraction) -> Union[int, str]:
    value = Fraction(value)
    if value.denominator == 1:
        return value.numerator
    return f"{value.numerator}/{value.denominator}"


def item_set(indices: Iterable[int] = ()) -> ItemSet:
    return frozenset(indices)


def one_based(items: Iterable[int]) -> list[int]:
    return [i + 1 for i in sorted(items)]


class Kind(str, enum.Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"
    VARIANT = "variant"


# ---------------------------------------------------------------------------
# Nominal problems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Selection:
    """Pick exactly ``p`` of ``n`` items."""

    n: int
    p: int

    @property
    def solution_size(self) -> int:
        return self.p

    def violations(self) -> list[str]:
        if not 1 <= self.p <= self.n:
            return [f"selection requires 1 <= p <= n (p={self.p}, n={self.n})"]
        return []

    def solutions(self) -> Iterator[ItemSet]:
        for combo in itertools.combinations(range(self.n), self.p):
            yield frozenset(combo)

    def is_feasible(self, z: Iterable[int]) -> bool:
        z = set(z)
        return len(z) == self.p and all(0 <= i < self.n for i in z)

    def admits_first_stage(self, x: Iterable[int]) -> bool:
        return len(set(x)) <= self.p

    def to_json(self) -> dict:
        return {"type": "selection", "n": self.n, "p": self.p}


@dataclass(frozen=True)
class RepSelection:
    """Pick exactly one item from every part of a partition of the items."""

    parts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "parts", tuple(tuple(sorted(part)) for part in self.parts)
        )

    @property
    def n(self) -> int:
        return sum(len(part) for part in self.parts)

    @property
    def solution_size(self) -> int:
        return len(self.parts)

    def part_of(self) -> dict[int, int]:
        return {i: j for j, part in enumerate(self.parts) for i in part}

    def violations(self) -> list[str]:
        out = []
        seen: dict[int, int] = {}
        for j, part in enumerate(self.parts):
            if not part:
                out.append(f"part {j + 1} is empty")
            for i in part:
                if i in seen:
                    out.append(
                        f"item {i + 1} appears in parts {seen[i] + 1} and {j + 1}"
                    )
                seen[i] = j
        n = self.n
        missing = sorted(set(range(n)) - set(seen))
        if missing or any(i < 0 or i >= n for i in seen):
            out.append(
                "parts must cover items 1..n exactly"
                + (f" (missing {one_based(missing)})" if missing else "")
            )
        return out

    def solutions(self) -> Iterator[ItemSet]:
        for combo in itertools.product(*self.parts):
            yield frozenset(combo)

    def is_feasible(self, z: Iterable[int]) -> bool:
        z = set(z)
        return all(len(z.intersection(part)) == 1 for part in self.parts) and len(
            z
        ) == len(self.parts)

    def admits_first_stage(self, x: Iterable[int]) -> bool:
        x = set(x)
        return all(len(x.intersection(part)) <= 1 for part in self.parts)

    def to_json(self) -> dict:
        return {
            "type": "rep_selection",
            "parts": [[i + 1 for i in part] for part in self.parts],
        }


NominalProblem = Union[Selection, RepSelection]


def nominal_solve(
    problem: NominalProblem,
    weights: Sequence[Number],
    forced_in: Iterable[int] = (),
    forced_out: Iterable[int] = (),
) -> tuple[Number, ItemSet]:
    """Minimize ``sum(weights[i] for i in z)`` over ``z`` in X_nom.

    ``z`` must contain every item of ``forced_in`` and none of ``forced_out``.
    Ties are broken toward lower indices. Raises :class:`Infeasible` when no
    such ``z`` exists; callers usually read that as a value of +inf.
    """
    forced_in = frozenset(forced_in)
    forced_out = frozenset(forced_out)
    if forced_in & forced_out:
        raise ValueError("forced_in and forced_out overlap")

    if isinstance(problem, Selection):
        need = problem.p - len(forced_in)
        if need < 0:
            raise Infeasible(f"{len(forced_in)} items forced in, p={problem.p}")
        pool = sorted(
            (i for i in range(problem.n) if i not in forced_in and i not in forced_out),
            key=lambda i: (weights[i], i),
        )
        if len(pool) < need:
            raise Infeasible("not enough items left to complete the selection")
        chosen = forced_in.union(pool[:need])
    else:
        picks = []
        for j, part in enumerate(problem.parts):
            inside = [i for i in part if i in forced_in]
            if len(inside) > 1:
                raise Infeasible(f"part {j + 1} has {len(inside)} forced items")
            if inside:
                picks.append(inside[0])
                continue
            allowed = [i for i in part if i not in forced_out]
            if not allowed:
                raise Infeasible(f"every item of part {j + 1} is forced out")
            picks.append(min(allowed, key=lambda i: (weights[i], i)))
        chosen = frozenset(picks)
    return sum(weights[i] for i in chosen), chosen


# ---------------------------------------------------------------------------
# Costs and instances
# ---------------------------------------------------------------------------


def _frac_tuple(values) -> tuple[Fraction, ...]:
    return tuple(as_fraction(v) for v in values)


@dataclass(frozen=True)
class CostProfile:
    """Lower/upper costs for both stages; increments are ``hi - lo``."""

    c_lo: tuple[Fraction, ...]
    c_hi: tuple[Fraction, ...]
    d_lo: tuple[Fraction, ...]
    d_hi: tuple[Fraction, ...]

    def __post_init__(self):
        for name in ("c_lo", "c_hi", "d_lo", "d_hi"):
            object.__setattr__(self, name, _frac_tuple(getattr(self, name)))

    @property
    def n(self) -> int:
        return len(self.c_lo)

    @property
    def c_inc(self) -> tuple[Fraction, ...]:
        return tuple(h - l for l, h in zip(self.c_lo, self.c_hi))

    @property
    def d_inc(self) -> tuple[Fraction, ...]:
        return tuple(h - l for l, h in zip(self.d_lo, self.d_hi))

    def shifted(self, s: Number) -> "CostProfile":
        return CostProfile(
            *(tuple(v + s for v in vec) for vec in (self.c_lo, self.c_hi, self.d_lo, self.d_hi))
        )


@dataclass(frozen=True)
class Instance:
    nominal: NominalProblem
    costs: CostProfile
    gamma: Fraction
    kind: Kind = Kind.DISCRETE
    signed_costs: bool = False

    def __post_init__(self):
        object.__setattr__(self, "gamma", as_fraction(self.gamma))
        object.__setattr__(self, "kind", Kind(self.kind))

    @property
    def n(self) -> int:
        return self.costs.n

    @property
    def int_gamma(self) -> int:
        if self.gamma.denominator != 1:
            raise ValueError(f"budget {self.gamma} is not an integer")
        return self.gamma.numerator

    def with_kind(self, kind: Kind) -> "Instance":
        return Instance(self.nominal, self.costs, self.gamma, Kind(kind), self.signed_costs)

    def with_gamma(self, gamma) -> "Instance":
        return Instance(self.nominal, self.costs, gamma, self.kind, self.signed_costs)

    def with_nominal(self, nominal: NominalProblem) -> "Instance":
        return Instance(nominal, self.costs, self.gamma, self.kind, self.signed_costs)


def validate(instance: Instance) -> list[str]:
    """Return every violated invariant; an empty list means admissible."""
    out: list[str] = []
    costs = instance.costs
    out.extend(instance.nominal.violations())
    lengths = {name: len(getattr(costs, name)) for name in ("c_lo", "c_hi", "d_lo", "d_hi")}
    n = instance.nominal.n
    for name, length in lengths.items():
        if length != n:
            out.append(f"{name} has length {length}, expected n={n}")
    if len(set(lengths.values())) != 1:
        return out
    for stage, lo, hi in (("c", costs.c_lo, costs.c_hi), ("d", costs.d_lo, costs.d_hi)):
        for i, (l, h) in enumerate(zip(lo, hi)):
            if h < l:
                out.append(f"{stage} increment negative at i={i + 1}")
    if not instance.signed_costs:
        for name in ("c_lo", "c_hi", "d_lo", "d_hi"):
            for i, v in enumerate(getattr(costs, name)):
                if v < 0:
                    out.append(f"negative cost {name}[{i + 1}]={v}")
    if instance.gamma < 0:
        out.append(f"gamma must be >= 0 (got {instance.gamma})")
    if instance.kind is Kind.DISCRETE and instance.gamma.denominator != 1:
        out.append(f"discrete budget must be an integer (got {instance.gamma})")
    return out


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

_COST_FIELDS = ("c_lo", "c_hi", "d_lo", "d_hi")


def instance_to_dict(instance: Instance) -> dict:
    data = {
        "problem": instance.nominal.to_json(),
        "gamma": format_rational(instance.gamma),
        "kind": instance.kind.value,
    }
    for name in _COST_FIELDS:
        data[name] = [format_rational(v) for v in getattr(instance.costs, name)]
    if instance.signed_costs:
        data["signed_costs"] = True
    return data


def write_instance(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2) + "\n"


def _number(value, field_name):
    try:
        return as_fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not an exact number: {value!r}", field=field_name) from exc


def _problem_from_dict(data) -> NominalProblem:
    if not isinstance(data, dict) or "type" not in data:
        raise SchemaError("problem.type")
    kind = data["type"]
    if kind == "selection":
        for key in ("n", "p"):
            if key not in data:
                raise SchemaError(f"problem.{key}")
        return Selection(int(data["n"]), int(data["p"]))
    if kind == "rep_selection":
        if "parts" not in data:
            raise SchemaError("problem.parts")
        try:
            parts = tuple(tuple(int(i) - 1 for i in part) for part in data["parts"])
        except (TypeError, ValueError) as exc:
            raise ParseError("parts must be lists of item indices", field="problem.parts") from exc
        return RepSelection(parts)
    raise ParseError(f"unknown problem type {kind!r}", field="problem.type")


def instance_from_dict(data: dict) -> Instance:
    if not isinstance(data, dict):
        raise ParseError("instance must be a JSON object")
    for key in ("problem", "gamma", "kind", *_COST_FIELDS):
        if key not in data:
            raise SchemaError(key)
    nominal = _problem_from_dict(data["problem"])
    vectors = {}
    for name in _COST_FIELDS:
        values = data[name]
        if not isinstance(values, list):
            raise ParseError("expected a list", field=name)
        vectors[name] = tuple(_number(v, f"{name}[{k + 1}]") for k, v in enumerate(values))
    try:
        kind = Kind(data["kind"])
    except ValueError as exc:
        raise ParseError(f"unknown kind {data['kind']!r}", field="kind") from exc
    return Instance(
        nominal=nominal,
        costs=CostProfile(**vectors),
        gamma=_number(data["gamma"], "gamma"),
        kind=kind,
        signed_costs=bool(data.get("signed_costs", False)),
    )


def read_instance(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from exc
    return instance_from_dict(data)


# ---------------------------------------------------------------------------
# Helpers shared by the solvers
# ---------------------------------------------------------------------------


def first_stage_candidates(problem: NominalProblem) -> Iterator[ItemSet]:
    """All first-stage sets that extend to some nominal solution.

    Order: by cardinality, then lexicographic on sorted indices.
    """
    seen = set()
    for size in range(problem.solution_size + 1):
        for combo in itertools.combinations(range(problem.n), size):
            x = frozenset(combo)
            if x in seen or not problem.admits_first_stage(x):
                continue
            seen.add(x)
            yield x


def completions(problem: NominalProblem, x: ItemSet) -> Iterator[ItemSet]:
    """Every second-stage set y with x + y in X_nom and x, y disjoint."""
    for z in problem.solutions():
        if x <= z:
            yield z - x


def scaled_integers(costs: CostProfile) -> tuple[int, list[list[int]]]:
    """Scale all four vectors by the LCM of their denominators.

    Returns ``(scale, [c_lo, c_hi, d_lo, d_hi])`` with plain ints; an optimum
    computed on the scaled data divides back by ``scale``.
    """
    scale = 1
    for vec in (costs.c_lo, costs.c_hi, costs.d_lo, costs.d_hi):
        for v in vec:
            scale = scale * v.denominator // math.gcd(scale, v.denominator)
    vectors = [
        [v.numerator * (scale // v.denominator) for v in vec]
        for vec in (costs.c_lo, costs.c_hi, costs.d_lo, costs.d_hi)
    ]
    return scale, vectors


def positive_part(value: Number) -> Number:
    return value if value > 0 else 0
