import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from strategies import table1

from twostage_robust import (
    CostProfile,
    Instance,
    Kind,
    NonpositiveDenominator,
    RepSelection,
    Selection,
    UnsupportedKind,
    solve_discrete_exact,
    static_solve,
    validate,
)
from twostage_robust.bench.experiment import (
    ExperimentConfig,
    GapRecord,
    expected_zero,
    gap,
    gen_costs,
    gen_instance,
    run_grid,
    write_csvs,
)
from twostage_robust.bench.gadgets import (
    gadget_repsel,
    gadget_selection,
    min_max_side,
    min_partition_difference,
    subset_sums,
)
from twostage_robust.bench.milp import build_static, build_two_stage, emit_milp
from twostage_robust.bench.rng import SplitMix64, trial_stream
from twostage_robust.bench.verify import run_verification

# -- generator -----------------------------------------------------------------


def test_splitmix_reference_outputs():
    rng = SplitMix64(1234567)
    assert [rng.next_u64() for _ in range(5)] == [
        6457827717110365317,
        3203168211198807973,
        9817491932198370423,
        4593380528125082431,
        16408922859458223821,
    ]


def test_randint_range_and_streams():
    rng = SplitMix64(5)
    draws = [rng.randint(1, 100) for _ in range(2000)]
    assert min(draws) == 1 and max(draws) == 100
    assert trial_stream(1, 3).next_u64() != trial_stream(1, 4).next_u64()
    with pytest.raises(ValueError):
        rng.randint(3, 2)


def test_generated_costs_golden_and_ordered():
    costs = gen_costs(1, 0, 20)
    assert (costs.c_lo[0], costs.c_hi[0], costs.d_hi[0]) == (47, 53, 59)
    assert [int(v) for v in costs.c_lo[:5]] == [47, 38, 100, 13, 9]
    for i in range(20):
        assert costs.c_lo[i] == costs.d_lo[i] <= costs.c_hi[i] <= costs.d_hi[i]
        assert 1 <= costs.c_lo[i] and costs.d_hi[i] <= 100


def test_generation_is_deterministic_and_shared_across_cells():
    assert gen_instance(1, 0, 20, 8, 1) == gen_instance(1, 0, 20, 8, 1)
    assert gen_instance(1, 0, 20, 8, 1).costs == gen_instance(1, 0, 20, 3, 2).costs
    assert gen_instance(1, 0, 20).costs != gen_instance(1, 1, 20).costs
    assert validate(gen_instance(7, 2, 20, 5, 3)) == []


# -- gaps and grids ------------------------------------------------------------


def test_gap_values():
    assert gap(11, 8) == Fraction(3, 8)
    assert gap(10, 10) == 0
    assert gap(8, 11) < 0
    with pytest.raises(NonpositiveDenominator):
        gap(1, 0)


def test_expected_zero_cells():
    assert expected_zero(20, 1, 1) and expected_zero(20, 20, 3) and expected_zero(20, 5, 5)
    assert not expected_zero(20, 8, 1)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(n=5, trials=0)
    with pytest.raises(ValueError):
        ExperimentConfig(n=5, p_values=[6], gamma_values=[1])
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"n": 5, "bogus": 1})
    cfg = ExperimentConfig(n=4, p_values=[1, 2], gamma_values=[1, 2, 3])
    assert cfg.cells() == [(1, 1), (2, 1), (2, 2)]


def test_gap_record_recomputes_from_values():
    rec = GapRecord(3, 1, [Fraction(11), Fraction(9)], [Fraction(8), None], [0.1, 0.3])
    assert rec.gaps == [Fraction(3, 8)] and rec.timeouts == 1
    assert rec.mean_gap == Fraction(3, 8) and rec.median_seconds == pytest.approx(0.2)


def small_config(**kw):
    base = dict(n=7, trials=3, seed=4, p_values=list(range(1, 8)), gamma_values=[1, 2, 3], time_limit_secs=None)
    base.update(kw)
    return ExperimentConfig(**base)


def test_run_grid_small(tmp_path):
    records = run_grid(small_config())
    assert len(records) == len(small_config().cells())
    for rec in records:
        assert all(g >= 0 for g in rec.gaps)
        if rec.expected_zero:
            assert rec.mean_gap == 0
    paths = write_csvs(records, tmp_path)
    rows = paths["gap_mean"].read_text().splitlines()
    assert rows[0] == "p,1,2,3"
    assert rows[1].startswith("1,0.00,,")
    assert len(rows) == 8
    times = paths["time_median"].read_text().splitlines()
    assert all(v.isdigit() for v in times[1].split(",")[1:2])
    cells = paths["cells"].read_text().splitlines()
    assert cells[0].startswith("p,gamma,mean_gap_percent")


def test_run_grid_is_deterministic_and_schedule_independent(tmp_path):
    a = write_csvs(run_grid(small_config()), tmp_path / "a")
    b = write_csvs(run_grid(small_config(workers=2)), tmp_path / "b")
    assert a["gap_mean"].read_bytes() == b["gap_mean"].read_bytes()


def test_run_grid_records_time_limit_hits():
    records = run_grid(small_config(n=12, p_values=[6], gamma_values=[2], time_limit_secs=0.0, warm_start=False))
    assert records[0].timeouts == 3 and records[0].mean_gap is None


# -- gadgets -------------------------------------------------------------------


@pytest.mark.parametrize("weights, expected", [((1, 1), 0), ((1, 2), 1), ((3, 1, 2), 0)])
def test_repsel_gadget_examples(weights, expected):
    inst = gadget_repsel(weights)
    assert inst.signed_costs and validate(inst) == []
    assert solve_discrete_exact(inst).value == expected


def test_repsel_gadget_shift():
    inst = gadget_repsel((1, 2), shift=30)
    assert not inst.signed_costs and validate(inst) == []
    assert solve_discrete_exact(inst).value - 2 * 30 == 1


@pytest.mark.parametrize("weights, expected", [((1, 1), 3), ((1, 2), 5), ((1, 1, 2), 6)])
def test_selection_gadget_examples(weights, expected):
    inst = gadget_selection(weights)
    assert inst.n == 2 * len(weights) + 1 and inst.nominal.p == len(weights) + 1
    assert solve_discrete_exact(inst).value == expected


def test_gadget_input_checks():
    with pytest.raises(ValueError):
        gadget_repsel([])
    with pytest.raises(ValueError):
        gadget_selection([1, 0])


def test_subset_sum_helpers():
    assert subset_sums([2, 3]) == {0, 2, 3, 5}
    assert min_partition_difference([3, 1, 2]) == 0
    assert min_max_side([1, 2]) == 2


@given(weights=st.lists(st.integers(1, 20), min_size=1, max_size=6))
def test_gadgets_encode_partition(weights):
    A = Fraction(sum(weights), 2)
    assert solve_discrete_exact(gadget_repsel(weights)).value == min_partition_difference(weights)
    assert solve_discrete_exact(gadget_selection(weights)).value == 2 * A + min_max_side(weights)


def test_original_repsel_constant_is_too_small():
    """With M = 2A + 1 the gadget undercuts the partition value for (1, 1)."""
    inst = gadget_repsel((1, 1))
    costs = inst.costs
    small_m = Fraction(3)
    d_hi = tuple(lo if inc == 0 else lo + small_m for lo, inc in zip(costs.d_lo, costs.d_inc))
    weak = Instance(inst.nominal, CostProfile(costs.c_lo, costs.c_hi, costs.d_lo, d_hi), 1, signed_costs=True)
    assert solve_discrete_exact(weak).value == -3


# -- LP export -----------------------------------------------------------------


def _solve_with_scipy(model):
    opt = pytest.importorskip("scipy.optimize")
    names = model.variables
    idx = {v: k for k, v in enumerate(names)}
    cost = np.zeros(len(names))
    for coef, var in model.objective:
        cost[idx[var]] += coef
    A = np.zeros((len(model.rows), len(names)))
    lo, hi = [], []
    for r, row in enumerate(model.rows):
        for coef, var in row.terms:
            A[r, idx[var]] += coef
        lo.append(row.rhs if row.sense in (">=", "=") else -np.inf)
        hi.append(row.rhs if row.sense in ("<=", "=") else np.inf)
    binary = set(model.binaries)
    res = opt.milp(
        cost,
        constraints=opt.LinearConstraint(A, lo, hi),
        integrality=np.array([v in binary for v in names], dtype=int),
        bounds=opt.Bounds(
            [-np.inf if v in model.free else 0 for v in names],
            [1 if v in binary else np.inf for v in names],
        ),
    )
    assert res.success
    return res.fun / model.scale


def test_lp_counts_table1():
    model = build_two_stage(table1())
    assert len(model.binaries) == 3 + 2 * 3
    counts = model.group_counts()
    assert counts["worst_case"] == 2
    assert counts["second_stage_dual"] == 6 and counts["first_stage_dual"] == 6


@pytest.mark.parametrize("which", ["two_stage", "static"])
def test_lp_is_byte_stable(which):
    assert emit_milp(table1(), which) == emit_milp(table1(), which)


def test_lp_rejects_wrong_kind():
    with pytest.raises(UnsupportedKind):
        emit_milp(table1(Kind.CONTINUOUS))
    with pytest.raises(UnsupportedKind):
        emit_milp(table1(Kind.VARIANT), "static")
    with pytest.raises(ValueError):
        emit_milp(table1(), "other")


def test_lp_text_layout():
    text = emit_milp(table1())
    lines = text.splitlines()
    assert lines[2] == "Minimize" and lines[-1] == "End"
    assert " t free" in lines
    assert sum(1 for line in lines if line.startswith(" worst_")) == 2
    assert all(len(line) < 255 for line in lines)


def test_lp_fractional_costs_are_scaled():
    costs = CostProfile(["1/2", 1], ["3/2", 2], ["1/3", 1], [1, 3])
    inst = Instance(Selection(2, 1), costs, 1)
    model = build_two_stage(inst)
    assert model.scale == 6
    assert "robust value = objective / 6" in emit_milp(inst)


@pytest.mark.parametrize("seed", range(12))
def test_exported_models_solve_to_the_robust_values(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 6)
    if seed % 2:
        nominal = Selection(n, rng.randint(1, n))
    else:
        nominal = RepSelection(tuple((2 * j, 2 * j + 1) for j in range(n // 2)))
        n = nominal.n
    c_lo = [rng.randint(0, 20) for _ in range(n)]
    d_lo = [rng.randint(0, 20) for _ in range(n)]
    costs = CostProfile(c_lo, [v + rng.randint(0, 20) for v in c_lo], d_lo, [v + rng.randint(0, 20) for v in d_lo])
    inst = Instance(nominal, costs, rng.randint(0, 3))
    assert _solve_with_scipy(build_two_stage(inst)) == pytest.approx(float(solve_discrete_exact(inst).value))
    assert _solve_with_scipy(build_static(inst)) == pytest.approx(float(static_solve(inst).value))


def test_static_model_with_fractional_budget():
    inst = table1(Kind.CONTINUOUS, Fraction(3, 2))
    assert _solve_with_scipy(build_static(inst)) == pytest.approx(float(static_solve(inst).value))


def test_exported_gadget_model():
    inst = gadget_repsel((1, 2))
    assert _solve_with_scipy(build_two_stage(inst)) == pytest.approx(1.0)


# -- verification harness ------------------------------------------------------


def test_run_verification_reports_counts():
    result = run_verification(count=3, seed=2, equal_cost=3)
    assert result.ok
    assert result.checked == {"continuous": 3, "discrete": 3, "variant": 3, "static": 3, "equalcost": 3}
