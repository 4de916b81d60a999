"""Random selection instances, gap grids and their CSV summaries."""

from __future__ import annotations

import csv
import logging
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from ..disc_exact import solve_discrete_exact
from ..errors import InvariantViolated, NonpositiveDenominator, TimeLimitExceeded
from ..model import CostProfile, Instance, Kind, Selection
from ..onestage import static_solve
from .rng import trial_stream

log = logging.getLogger(__name__)


def gen_costs(seed: int, trial_index: int, n: int) -> CostProfile:
    """Per item, three uniform draws from 1..100 sorted into lo <= mid <= hi.

    Both stages share the lower cost ``lo``; the first stage tops out at
    ``mid`` and the second at ``hi``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    stream = trial_stream(seed, trial_index)
    lo, mid, hi = [], [], []
    for _ in range(n):
        v1, v2, v3 = sorted(stream.randint(1, 100) for _ in range(3))
        lo.append(v1)
        mid.append(v2)
        hi.append(v3)
    return CostProfile(lo, mid, lo, hi)


def gen_instance(seed: int, trial_index: int, n: int, p: int = 1, gamma: int = 0) -> Instance:
    """Discrete-budget selection instance for trial ``trial_index`` of ``seed``.

    The costs depend only on ``(seed, trial_index, n)``, so every grid cell
    solves the same instances with its own ``p`` and ``gamma``.
    """
    return Instance(Selection(n, p), gen_costs(seed, trial_index, n), gamma, Kind.DISCRETE)


def gap(r1, r2d) -> Fraction:
    """Relative benefit of the two-stage model: ``r1 / r2d - 1``."""
    r1, r2d = Fraction(r1), Fraction(r2d)
    if r2d <= 0:
        raise NonpositiveDenominator(f"two-stage value must be positive, got {r2d}")
    return r1 / r2d - 1


@dataclass
class ExperimentConfig:
    n: int = 20
    trials: int = 50
    seed: int = 1
    p_values: list[int] = field(default_factory=lambda: list(range(1, 21)))
    gamma_values: list[int] = field(default_factory=lambda: list(range(1, 21)))
    time_limit_secs: Optional[float] = 300.0
    warm_start: bool = True
    fast_paths: bool = True
    # budgets above p behave exactly like gamma = p, so they are skipped by default
    skip_gamma_above_p: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for p in self.p_values:
            if not 1 <= p <= self.n:
                raise ValueError(f"p={p} outside 1..{self.n}")
        for g in self.gamma_values:
            if g < 0:
                raise ValueError(f"gamma={g} is negative")

    def cells(self) -> list[tuple[int, int]]:
        return [
            (p, g)
            for p in self.p_values
            for g in self.gamma_values
            if not (self.skip_gamma_above_p and g > p)
        ]

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


def expected_zero(n: int, p: int, gamma: int) -> bool:
    """Cells where one-stage and two-stage values coincide for every instance."""
    return p in (1, n) or gamma >= p


@dataclass
class TrialResult:
    p: int
    gamma: int
    trial: int
    r1: Fraction
    r2d: Optional[Fraction]
    seconds: float

    @property
    def timed_out(self) -> bool:
        return self.r2d is None


@dataclass
class GapRecord:
    p: int
    gamma: int
    r1: list[Fraction]
    r2d: list[Optional[Fraction]]
    seconds: list[float]
    expected_zero: bool = False

    @property
    def gaps(self) -> list[Fraction]:
        """Per-trial gaps, recomputed from the stored values; timeouts excluded."""
        return [gap(a, b) for a, b in zip(self.r1, self.r2d) if b is not None]

    @property
    def timeouts(self) -> int:
        return sum(v is None for v in self.r2d)

    @property
    def mean_gap(self) -> Optional[Fraction]:
        gaps = self.gaps
        return sum(gaps, Fraction(0)) / len(gaps) if gaps else None

    @property
    def median_seconds(self) -> float:
        return statistics.median(self.seconds)


def solve_trial(config: ExperimentConfig, p: int, gamma: int, trial: int) -> TrialResult:
    instance = gen_instance(config.seed, trial, config.n, p, gamma)
    r1 = static_solve(instance).value
    start = time.perf_counter()
    try:
        r2d = solve_discrete_exact(
            instance,
            warm_start=config.warm_start,
            time_limit=config.time_limit_secs,
            fast_paths=config.fast_paths,
        ).value
    except TimeLimitExceeded:
        log.warning("time limit hit at p=%d gamma=%d trial=%d", p, gamma, trial)
        r2d = None
    return TrialResult(p, gamma, trial, r1, r2d, time.perf_counter() - start)


def _solve_task(args):
    return solve_trial(*args)


def run_grid(config: ExperimentConfig) -> list[GapRecord]:
    """Solve every (p, gamma, trial) task and aggregate one record per cell.

    Tasks may run in worker processes; aggregation sorts results by
    ``(p, gamma, trial)`` so the output does not depend on scheduling.
    Raises :class:`InvariantViolated` if any gap is negative or an
    expected-zero cell has a positive mean gap.
    """
    tasks = [(config, p, g, t) for p, g in config.cells() for t in range(config.trials)]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_solve_task, tasks, chunksize=4))
    else:
        results = [_solve_task(task) for task in tasks]
    results.sort(key=lambda r: (r.p, r.gamma, r.trial))

    records = []
    for p, g in config.cells():
        mine = [r for r in results if r.p == p and r.gamma == g]
        record = GapRecord(
            p=p,
            gamma=g,
            r1=[r.r1 for r in mine],
            r2d=[r.r2d for r in mine],
            seconds=[r.seconds for r in mine],
            expected_zero=expected_zero(config.n, p, g),
        )
        negative = [v for v in record.gaps if v < 0]
        if negative:
            raise InvariantViolated(f"negative gap at p={p}, gamma={g}: {negative[0]}")
        if record.expected_zero and record.mean_gap not in (None, 0):
            raise InvariantViolated(f"cell p={p}, gamma={g} should have zero gap")
        records.append(record)
        log.info("p=%d gamma=%d mean gap %s", p, g, record.mean_gap)
    return records


def _matrix(records: list[GapRecord], render) -> list[list[str]]:
    ps = sorted({r.p for r in records})
    gs = sorted({r.gamma for r in records})
    by_cell = {(r.p, r.gamma): r for r in records}
    rows = [["p"] + [str(g) for g in gs]]
    for p in ps:
        row = [str(p)]
        for g in gs:
            rec = by_cell.get((p, g))
            row.append("" if rec is None else render(rec))
        rows.append(row)
    return rows


def _gap_percent(rec: GapRecord) -> str:
    if rec.mean_gap is None:
        return ""
    return f"{float(rec.mean_gap) * 100:.2f}"


def _seconds_up(rec: GapRecord) -> str:
    return str(math.ceil(rec.median_seconds))


def write_csvs(records: list[GapRecord], out_dir) -> dict[str, Path]:
    """Write ``gap_mean.csv``, ``time_median.csv`` and a long-form ``cells.csv``.

    The two matrices have p down the rows and gamma across the columns; gaps
    are percentages with two decimals and times are median seconds rounded
    up to whole seconds. ``cells.csv`` flags expected-zero cells and counts
    time-limit hits.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "gap_mean": out / "gap_mean.csv",
        "time_median": out / "time_median.csv",
        "cells": out / "cells.csv",
    }
    for key, render in (("gap_mean", _gap_percent), ("time_median", _seconds_up)):
        with paths[key].open("w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(_matrix(records, render))
    with paths["cells"].open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["p", "gamma", "mean_gap_percent", "median_seconds", "timeouts", "expected_zero"])
        for rec in records:
            writer.writerow(
                [rec.p, rec.gamma, _gap_percent(rec), _seconds_up(rec), rec.timeouts, int(rec.expected_zero)]
            )
    return paths
