from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .model import ItemSet, format_rational, one_based


@dataclass(frozen=True)
class SolveReport:
    """Optimal value plus the evidence needed to audit it.

    ``witness_x`` holds 0-based indices; :meth:`to_dict` converts to the
    1-based external convention. ``certified`` is ``"decomposition"`` when the
    value comes from an exact decomposition/enumeration and ``"oracle"`` when it
    was produced by a brute-force reference solver.
    """

    value: Fraction
    witness_x: ItemSet
    method: str
    provenance: dict[str, Any] = field(default_factory=dict)
    millis: float = 0.0
    certified: str = "decomposition"

    def to_dict(self) -> dict:
        return {
            "value": str(format_rational(self.value)),
            "value_float": float(self.value),
            "witness_x": one_based(self.witness_x),
            "method": self.method,
            "subproblem_provenance": _jsonable(self.provenance),
            "millis": round(self.millis, 3),
            "certified": self.certified,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(format_rational(obj))
    if isinstance(obj, (frozenset, set)):
        return one_based(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


@contextmanager
def stopwatch():
    """Yield a one-element list that receives elapsed milliseconds on exit."""
    box = [0.0]
    start = time.perf_counter()
    try:
        yield box
    finally:
        box[0] = (time.perf_counter() - start) * 1000.0
