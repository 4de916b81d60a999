import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st
from strategies import instances, nominals, table1

from twostage_robust import (
    CostProfile,
    Infeasible,
    Instance,
    Kind,
    ParseError,
    RepSelection,
    SchemaError,
    Selection,
    nominal_solve,
    read_instance,
    validate,
    write_instance,
)
from twostage_robust.model import (
    first_stage_candidates,
    format_rational,
    instance_to_dict,
    scaled_integers,
)


def test_table1_is_valid():
    assert validate(table1()) == []


def test_negative_increment_is_reported_with_position():
    inst = Instance(Selection(1, 1), CostProfile([5], [3], [0], [0]), 1)
    assert validate(inst) == ["c increment negative at i=1"]


def test_negative_cost_needs_flag():
    costs = CostProfile([-1, 2], [0, 2], [0, 0], [1, 1])
    inst = Instance(Selection(2, 1), costs, 1, Kind.CONTINUOUS)
    assert any(v.startswith("negative cost") for v in validate(inst))
    signed = Instance(Selection(2, 1), costs, 1, Kind.CONTINUOUS, signed_costs=True)
    assert validate(signed) == []


def test_validate_structure_and_budget():
    bad = Instance(RepSelection(((0, 1), (1,))), CostProfile([0] * 2, [0] * 2, [0] * 2, [0] * 2), Fraction(1, 2))
    messages = validate(bad)
    assert any("appears in parts" in m for m in messages)
    assert any("discrete budget must be an integer" in m for m in messages)
    assert validate(Instance(Selection(2, 3), CostProfile([0] * 2, [0] * 2, [0] * 2, [0] * 2), 0))


@pytest.mark.parametrize(
    "problem, weights, kwargs, expected",
    [
        (Selection(3, 2), (3, 1, 4), {}, (4, {0, 1})),
        (Selection(3, 2), (3, 1, 4), {"forced_out": {1}}, (7, {0, 2})),
        (RepSelection(((0, 1), (2, 3))), (5, 2, 9, 9), {}, (11, {1, 2})),
    ],
)
def test_nominal_solve_examples(problem, weights, kwargs, expected):
    value, z = nominal_solve(problem, weights, **kwargs)
    assert (value, set(z)) == expected


@pytest.mark.parametrize(
    "problem, kwargs",
    [
        (Selection(3, 1), {"forced_in": {0, 1}}),
        (Selection(3, 2), {"forced_out": {0, 1}}),
        (RepSelection(((0, 1), (2,))), {"forced_in": {0, 1}}),
        (RepSelection(((0, 1), (2,))), {"forced_out": {2}}),
    ],
)
def test_nominal_solve_infeasible(problem, kwargs):
    with pytest.raises(Infeasible):
        nominal_solve(problem, [1] * problem.n, **kwargs)


def test_nominal_solve_rejects_overlapping_forcing():
    with pytest.raises(ValueError):
        nominal_solve(Selection(2, 1), [1, 1], forced_in={0}, forced_out={0})


@given(
    n=st.integers(1, 8),
    data=st.data(),
)
def test_selection_matches_exhaustive_minimum(n, data):
    p = data.draw(st.integers(1, n))
    weights = data.draw(st.lists(st.integers(-5, 20), min_size=n, max_size=n))
    forced_out = data.draw(st.sets(st.integers(0, n - 1), max_size=n - p))
    forced_in = data.draw(st.sets(st.integers(0, n - 1).filter(lambda i: i not in forced_out), max_size=p))
    problem = Selection(n, p)
    value, z = nominal_solve(problem, weights, forced_in, forced_out)
    assert problem.is_feasible(z) and forced_in <= z and not (forced_out & z)
    brute = min(
        sum(weights[i] for i in combo)
        for combo in itertools.combinations(range(n), p)
        if forced_in <= set(combo) and not forced_out & set(combo)
    )
    assert value == brute


@given(problem=nominals(max_n=8), data=st.data())
def test_forcing_out_more_never_decreases_value(problem, data):
    weights = data.draw(st.lists(st.integers(0, 20), min_size=problem.n, max_size=problem.n))
    out = data.draw(st.sets(st.integers(0, problem.n - 1)))
    try:
        small, z = nominal_solve(problem, weights)
        large, z2 = nominal_solve(problem, weights, forced_out=out)
    except Infeasible:
        return
    assert problem.is_feasible(z) and problem.is_feasible(z2)
    assert large >= small


@given(inst=instances(max_n=6))
def test_json_round_trip(inst):
    assert read_instance(write_instance(inst)) == inst


def test_round_trip_with_fractions_and_signed_costs():
    costs = CostProfile(["3/2", -1], ["5/2", 0], [0, 0], [1, "7/3"])
    inst = Instance(RepSelection(((0,), (1,))), costs, Fraction(3, 2), Kind.CONTINUOUS, signed_costs=True)
    text = write_instance(inst)
    assert '"3/2"' in text
    assert read_instance(text) == inst


def test_fraction_strings_parse_exactly():
    data = instance_to_dict(table1())
    data["c_lo"][0] = "3/2"
    import json

    assert read_instance(json.dumps(data)).costs.c_lo[0] == Fraction(3, 2)


def test_missing_gamma_is_schema_error():
    import json

    data = instance_to_dict(table1())
    del data["gamma"]
    with pytest.raises(SchemaError) as err:
        read_instance(json.dumps(data))
    assert err.value.field == "gamma"


def test_parse_error_has_line_number():
    with pytest.raises(ParseError) as err:
        read_instance('{\n  "gamma": 1,\n  oops\n}')
    assert err.value.line == 3


def test_parse_error_names_bad_field():
    import json

    data = instance_to_dict(table1())
    data["d_hi"][1] = "ten"
    with pytest.raises(ParseError) as err:
        read_instance(json.dumps(data))
    assert err.value.field == "d_hi[2]"


def test_external_indices_are_one_based():
    inst = Instance(RepSelection(((0, 1), (2,))), CostProfile([0] * 3, [0] * 3, [0] * 3, [0] * 3), 0)
    assert instance_to_dict(inst)["problem"] == {"type": "rep_selection", "parts": [[1, 2], [3]]}


def test_first_stage_candidates_order_and_admissibility():
    cands = list(first_stage_candidates(RepSelection(((0, 1), (2,)))))
    assert cands[0] == frozenset()
    assert [len(x) for x in cands] == sorted(len(x) for x in cands)
    assert frozenset({0, 1}) not in cands
    assert frozenset({0, 2}) in cands


def test_scaled_integers_and_format():
    scale, vecs = scaled_integers(CostProfile(["1/2"], ["2/3"], [1], [1]))
    assert scale == 6 and vecs == [[3], [4], [6], [6]]
    assert format_rational(Fraction(4, 2)) == 2
    assert format_rational(Fraction(1, 3)) == "1/3"
