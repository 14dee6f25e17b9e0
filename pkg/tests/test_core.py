import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lotto_prealloc import core
from lotto_prealloc.core import (make_preallocation, proportional_preallocation, validate_instance,
                                 weighted_norm_sq)

from .strategies import instances, simplex_points


def test_validate_builds_cached_total():
    inst = validate_instance([0.5, 0.5], 1, 0.5, 1, 1, n=2)
    assert inst.W == 1.0 and inst.n == 2
    inst = validate_instance([2.0], 0.5, 0.0, 1, 3, n=1)
    assert inst.W == 2.0


@pytest.mark.parametrize("kwargs, err", [
    (dict(w=[0.5, -0.5], q=1, P=0.5, R_A=1, R_B=1), core.NonPositiveWeight),
    (dict(w=[], q=1, P=0, R_A=1, R_B=1), core.EmptyBattlefields),
    (dict(w=[1.0], q=0, P=0, R_A=1, R_B=1), core.NonPositiveQ),
    (dict(w=[1.0], q=1, P=-1, R_A=1, R_B=1), core.NegativeBudget),
    (dict(w=[1.0], q=1, P=0, R_A=-0.1, R_B=1), core.NegativeBudget),
    (dict(w=[1.0], q=1, P=0, R_A=1, R_B=0), core.NonPositiveRB),
    (dict(w=[1.0, 1.0], q=1, P=0, R_A=1, R_B=1, n=3), core.EmptyBattlefields),
])
def test_validate_rejects(kwargs, err):
    with pytest.raises(err):
        validate_instance(**kwargs)


def test_error_names_offending_field():
    with pytest.raises(core.NonPositiveWeight, match=r"w\[1\]"):
        validate_instance([0.5, -0.5], 1, 0.5, 1, 1)


def test_zero_budgets_are_valid():
    inst = validate_instance([1.0], 1, 0.0, 0.0, 1.0)
    assert inst.P == 0 and inst.R_A == 0


@pytest.mark.parametrize("w, P, expected", [
    ([0.5, 0.5], 0.5, [0.25, 0.25]),
    ([2.0], 3.0, [3.0]),
    ([0.2, 0.3, 0.5], 1.0, [0.2, 0.3, 0.5]),
])
def test_proportional_preallocation(w, P, expected):
    inst = validate_instance(w, 1, P, 1, 1)
    p = proportional_preallocation(inst)
    np.testing.assert_allclose(p.p, expected, rtol=0, atol=1e-15)
    assert abs(p.total - P) <= core.simplex_tol(P)


@pytest.mark.parametrize("w, p, expected", [
    ([0.5, 0.5], [0.25, 0.25], 0.25),
    ([0.5, 0.5], [0.5, 0.0], 0.5),
    ([1.0], [2.0], 4.0),
])
def test_weighted_norm(w, p, expected):
    inst = validate_instance(w, 1, sum(p), 1, 1)
    assert weighted_norm_sq(inst, p) == pytest.approx(expected, abs=1e-15)


@given(st.data())
def test_proportional_split_minimizes_weighted_norm(data):
    inst = data.draw(instances())
    p = data.draw(simplex_points(inst))
    floor = inst.P**2 / inst.W
    star = weighted_norm_sq(inst, proportional_preallocation(inst))
    assert star == pytest.approx(floor, rel=1e-12, abs=1e-300)
    assert weighted_norm_sq(inst, p) >= floor * (1 - 1e-12)


@given(st.data())
def test_proportional_split_is_on_simplex(data):
    inst = data.draw(instances())
    p = proportional_preallocation(inst)
    assert all(x >= 0 for x in p.p)
    assert abs(p.total - inst.P) <= core.simplex_tol(inst.P)
    make_preallocation(inst, p.p)  # passes validation


def test_make_preallocation_checks_sum_and_sign():
    inst = validate_instance([0.5, 0.5], 1, 0.5, 1, 1)
    with pytest.raises(core.InvalidPreAllocation):
        make_preallocation(inst, [0.3, 0.3])
    with pytest.raises(core.InvalidPreAllocation):
        make_preallocation(inst, [0.6, -0.1])
    with pytest.raises(core.InvalidPreAllocation):
        make_preallocation(inst, [0.5])


def test_instance_serializes_to_json_object():
    inst = validate_instance([0.5, 0.5], 1, 0.5, 1, 1)
    data = json.loads(json.dumps(inst.to_dict()))
    assert data == {"n": 2, "w": [0.5, 0.5], "q": 1.0, "P": 0.5, "R_A": 1.0, "R_B": 1.0}
    assert validate_instance(data["w"], data["q"], data["P"], data["R_A"], data["R_B"]) == inst


def test_instances_are_immutable():
    inst = validate_instance([1.0], 1, 0, 1, 1)
    with pytest.raises(AttributeError):
        inst.P = 3.0
