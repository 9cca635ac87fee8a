import math

import pytest
from hypothesis import given, strategies as st

from primalcurv.errors import InputError, ObjectiveFaultError
from primalcurv.setfn import (
    GroundSet,
    SetFunctionHandle,
    UniformMatroid,
    audit_function,
    from_mask,
    to_mask,
)


def test_normalization_subtracts_empty_value():
    f = SetFunctionHandle(3, lambda s: 10.0 + len(s))
    assert f.evaluate(()) == 0.0
    assert f.evaluate((0, 2)) == 2.0


def test_registration_call_is_not_counted():
    f = SetFunctionHandle(3, lambda s: len(s))
    assert f.eval_count == 0
    f.evaluate((1,))
    f.marginal_gain(0, (1,))
    assert f.eval_count == 3
    f.reset_count()
    assert f.eval_count == 0


def test_marginal_gain_rejects_member():
    f = SetFunctionHandle(3, lambda s: len(s))
    with pytest.raises(InputError):
        f.marginal_gain(1, (1, 2))


def test_out_of_range_id():
    f = SetFunctionHandle(3, lambda s: len(s))
    with pytest.raises(InputError):
        f.evaluate((3,))


def test_non_finite_value_is_a_fault():
    f = SetFunctionHandle(2, lambda s: math.nan if len(s) == 2 else 0.0)
    with pytest.raises(ObjectiveFaultError):
        f.evaluate((0, 1))


def test_uniform_matroid_validation():
    g = GroundSet(4)
    with pytest.raises(InputError):
        UniformMatroid(g, 0)
    with pytest.raises(InputError):
        UniformMatroid(g, 5)
    m = UniformMatroid(g, 2)
    assert m.is_feasible((0, 3)) and not m.is_feasible((0, 1, 2))


@given(st.sets(st.integers(0, 19)))
def test_mask_round_trip(s):
    assert from_mask(to_mask(s)) == tuple(sorted(s))


def test_local_table_layout():
    f = SetFunctionHandle(4, lambda s: float(sum(2**x for x in s)))
    t = f.local_table((0,), (1, 3), 2)
    # bit 0 <-> element 1, bit 1 <-> element 3; base {0} contributes 1
    assert list(t) == [1.0, 3.0, 9.0, 11.0]
    assert f.local_table((0,), (1, 3), 2) is t


def test_audit_accepts_monotone_and_flags_violations():
    ok = audit_function(SetFunctionHandle(4, lambda s: len(s) ** 0.5))
    assert ok.ok and ok.exhaustive
    bad = audit_function(SetFunctionHandle(3, lambda s: -float(len(s))))
    assert not bad.ok
    assert any(v.kind == "monotonicity" for v in bad.violations)


def test_audit_nonzero_empty():
    rep = audit_function(lambda s: 1.0 + len(s), ground=GroundSet(2))
    assert any(v.kind == "nonzero-empty" for v in rep.violations)
