"""Command-line entry point: ``twostage-robust <command> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .bench.experiment import ExperimentConfig, run_grid, write_csvs
from .bench.gadgets import gadget_repsel, gadget_selection
from .bench.milp import emit_milp
from .bench.verify import SUITES, run_verification
from .cont_decomp import solve_continuous
from .disc_exact import solve_discrete_exact, solve_equal_costs_gamma1
from .errors import RobustError
from .model import Kind, read_instance, write_instance
from .onestage import static_solve
from .oracle import DEFAULT_CAP, brute_onestage, brute_rob_continuous, brute_rob_discrete, brute_variant
from .report import SolveReport, stopwatch
from .variant_budget import solve_variant

log = logging.getLogger("twostage_robust")

_BY_KIND = {
    Kind.CONTINUOUS: solve_continuous,
    Kind.DISCRETE: solve_discrete_exact,
    Kind.VARIANT: solve_variant,
}
_ORACLES = {
    Kind.CONTINUOUS: brute_rob_continuous,
    Kind.DISCRETE: brute_rob_discrete,
    Kind.VARIANT: brute_variant,
}


def _int_list(text: str) -> list[int]:
    """Parse ``"1,2,5-8"`` into ``[1, 2, 5, 6, 7, 8]``."""
    out: list[int] = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "-" in chunk:
            lo, hi = chunk.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(chunk))
    return out


def _read(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return read_instance(text)


def _write(text: str, path: str | None):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_solve(args) -> int:
    instance = _read(args.instance)
    method = args.method
    if method == "auto":
        report = _BY_KIND[instance.kind](instance)
    elif method == "continuous":
        report = solve_continuous(instance.with_kind(Kind.CONTINUOUS))
    elif method == "discrete":
        report = solve_discrete_exact(instance.with_kind(Kind.DISCRETE), time_limit=args.time_limit)
    elif method == "variant":
        report = solve_variant(instance.with_kind(Kind.VARIANT))
    elif method == "equalcost":
        report = solve_equal_costs_gamma1(instance.with_kind(Kind.DISCRETE))
    elif method == "static":
        report = static_solve(instance)
    else:  # oracle
        with stopwatch() as ms:
            value = _ORACLES[instance.kind](instance, cap=args.cap)
        report = SolveReport(
            value,
            frozenset(),
            f"oracle_{instance.kind.value}",
            provenance={"note": "brute-force oracles report values only"},
            millis=ms[0],
            certified="oracle",
        )
    print(report.to_json())
    return 0


def cmd_verify(args) -> int:
    result = run_verification(
        count=args.count,
        seed=args.seed,
        sizes=_int_list(args.n),
        suites=args.suite or tuple(SUITES),
        equal_cost=args.equal_cost,
    )
    for name, count in result.checked.items():
        bad = sum(m.suite == name for m in result.mismatches)
        print(f"{name}: {count - bad}/{count} equal")
    for m in result.mismatches[:5]:
        print(f"MISMATCH {m.suite}: solver {m.solver} oracle {m.oracle}")
        print(write_instance(m.instance))
    return 0 if result.ok else 1


def cmd_experiment(args) -> int:
    if args.config:
        config = ExperimentConfig.from_dict(json.loads(Path(args.config).read_text()))
    else:
        config = ExperimentConfig(
            n=args.n,
            trials=args.trials,
            seed=args.seed,
            p_values=_int_list(args.p) if args.p else list(range(1, args.n + 1)),
            gamma_values=_int_list(args.gamma) if args.gamma else list(range(1, args.n + 1)),
            time_limit_secs=args.time_limit,
            workers=args.workers,
        )
    records = run_grid(config)
    paths = write_csvs(records, args.out)
    for rec in records:
        mean = rec.mean_gap
        shown = "n/a" if mean is None else f"{float(mean) * 100:.2f}%"
        print(f"p={rec.p:>3} gamma={rec.gamma:>3} mean gap {shown:>8} median {rec.median_seconds:.3f}s")
    print("wrote " + ", ".join(str(p) for p in paths.values()))
    return 0


def cmd_gadget(args) -> int:
    weights = _int_list(args.weights)
    if args.kind == "repsel":
        instance = gadget_repsel(weights, shift=args.shift)
        offset = len(weights) * args.shift
        if offset:
            log.info("subtract %s from the optimum to recover the partition imbalance", offset)
    else:
        instance = gadget_selection(weights)
    _write(write_instance(instance), args.out)
    return 0


def cmd_export(args) -> int:
    _write(emit_milp(_read(args.instance), args.model), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twostage-robust", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an instance file and print a JSON report")
    p.add_argument("instance", help="instance JSON path, or - for stdin")
    p.add_argument(
        "--method",
        default="auto",
        choices=["auto", "continuous", "discrete", "variant", "equalcost", "static", "oracle"],
    )
    p.add_argument("--time-limit", type=float, default=None, help="seconds (discrete search)")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="largest n the oracle accepts")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="compare solvers with brute-force oracles on random instances")
    p.add_argument("--n", default="4-6", help="instance sizes, e.g. 4-6 or 4,6")
    p.add_argument("--count", type=int, default=50, help="instances per suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--suite", action="append", choices=sorted(SUITES))
    p.add_argument("--equal-cost", type=int, default=0, help="extra equal-cost budget-one checks")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("experiment", help="run the gap grid and write CSV matrices")
    p.add_argument("--config", help="JSON file with ExperimentConfig fields")
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--p", help="p values, e.g. 1-20")
    p.add_argument("--gamma", help="budget values, e.g. 1-20")
    p.add_argument("--time-limit", type=float, default=300.0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="results")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("gadget", help="write a partition gadget instance")
    p.add_argument("kind", choices=["repsel", "selection"])
    p.add_argument("weights", help="comma-separated positive integers")
    p.add_argument("--shift", type=int, default=0, help="uniform cost shift (repsel only)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gadget)

    p = sub.add_parser("export", help="write the LP-format model of an instance")
    p.add_argument("instance")
    p.add_argument("--model", choices=["two_stage", "static"], default="two_stage")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except RobustError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
