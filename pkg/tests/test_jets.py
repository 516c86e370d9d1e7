import cmath

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from radonhgf.jets import Jet, jet_fun, mixed_derivative, mp_precision, scalar_pow

cplx = st.complex_numbers(min_magnitude=0.3, max_magnitude=3, allow_nan=False, allow_infinity=False)


def test_first_derivative_of_square():
    assert mixed_derivative(lambda v: v[0] * v[0], [3.0], [[1.0]]) == pytest.approx(6.0)


def test_mixed_second_derivative():
    f = lambda v: v[0] * v[0] * v[1]  # noqa: E731
    assert mixed_derivative(f, [2.0, 5.0], [[1, 0], [0, 1]]) == pytest.approx(4.0)
    assert mixed_derivative(f, [2.0, 5.0], [[1, 0], [1, 0]]) == pytest.approx(10.0)


@given(cplx, cplx)
@settings(max_examples=40)
def test_division_inverts_multiplication(a, b):
    ja = Jet.variable(a, 0, 2) + Jet.variable(0, 1, 2) * 0.5
    jb = Jet.variable(b, 1, 2)
    back = (ja * jb) / jb
    np.testing.assert_allclose(back.coeffs, ja.coeffs, rtol=1e-10, atol=1e-10)


@given(cplx)
@settings(max_examples=40)
def test_exp_log_inverse(a):
    j = Jet.variable(a, 0, 3) + Jet.variable(0, 2, 3)
    back = jet_fun(jet_fun(j, "log"), "exp")
    np.testing.assert_allclose(back.coeffs, j.coeffs, rtol=1e-10, atol=1e-10)


@pytest.mark.parametrize("e", [0.5, -1.5 + 0.25j, 3])
def test_power_derivatives(e):
    c = 0.7 + 0.4j
    got = mixed_derivative(lambda v: scalar_pow(v[0], e), [c], [[1], [1], [1]])
    want = e * (e - 1) * (e - 2) * cmath.exp((e - 3) * cmath.log(c))
    assert abs(got - want) <= 1e-12 * abs(want)


def test_too_many_directions():
    with pytest.raises(ValueError):
        mixed_derivative(lambda v: v[0], [1.0], [[1.0]] * 5)


def test_mp_mode_carries_extra_digits():
    with mp_precision(40):
        got = mixed_derivative(lambda v: jet_fun(v[0], "log"), [mpmath.mpf(3)], [[1]], mp=True)
        assert abs(got - mpmath.mpf(1) / 3) < mpmath.mpf(10) ** -35
