import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fibretrap.casimir import CasimirInput, cp_shift, effective_input


def test_reference_estimate():
    shift = cp_shift(effective_input(200.0, 1.45, 4.0))
    assert shift < 0
    assert 3.0 <= abs(shift) <= 12.0


def test_zero_moments():
    assert cp_shift(CasimirInput(200.0, 1.45, ((0.0, 0.0, 0.0),))) == 0.0
    assert cp_shift(CasimirInput(200.0, 1.45, ())) == 0.0


def test_normal_component_weighted_twice():
    x = cp_shift(CasimirInput(150.0, 1.45, ((1.0, 0.0, 0.0),)))
    y = cp_shift(CasimirInput(150.0, 1.45, ((0.0, 1.0, 0.0),)))
    z = cp_shift(CasimirInput(150.0, 1.45, ((0.0, 0.0, 1.0),)))
    assert x == pytest.approx(2 * y, rel=1e-14) and y == pytest.approx(z, rel=1e-14)


def test_transitions_add():
    one = cp_shift(CasimirInput(200.0, 1.45, ((1.0, 2.0, 3.0),)))
    two = cp_shift(CasimirInput(200.0, 1.45, ((1.0, 2.0, 3.0), (1.0, 2.0, 3.0))))
    assert two == pytest.approx(2 * one, rel=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.floats(1.0, 5000.0), st.floats(1.01, 4.0), st.floats(0.01, 20.0))
def test_inverse_cube_law(D, n1, d):
    s1 = cp_shift(effective_input(D, n1, d))
    s2 = cp_shift(effective_input(2 * D, n1, d))
    assert s1 < 0
    assert s2 == pytest.approx(s1 / 8, rel=1e-12)
    assert abs(cp_shift(effective_input(D, n1 + 0.01, d))) > abs(s1)


@pytest.mark.parametrize("args", [(-1.0, 1.45, ((1, 1, 1),)), (200.0, 1.0, ((1, 1, 1),)), (200.0, 1.45, ((-1, 1, 1),))])
def test_invalid_input(args):
    with pytest.raises(ValueError):
        CasimirInput(*args)
