import math

import pytest

from radonhgf.matint import (
    DivergenceError,
    QuadratureSpec,
    beta_r_closed,
    beta_r_mc,
    beta_r_quad,
    beta_raw,
    calibration_constant,
    check_beta_closed,
    check_beta_contiguity,
    check_gamma_closed,
    check_gamma_contiguity,
    gamma_r_closed,
    gamma_r_mc,
    gamma_r_quad,
    gamma_raw,
)
from radonhgf.report import ResourceGuardError


@pytest.mark.parametrize(
    "r,a,want", [(1, 5, 24.0), (2, 3, 2 * math.pi), (3, 4, 12 * math.pi**3), (1, 0.5, math.sqrt(math.pi))]
)
def test_gamma_closed(r, a, want):
    assert gamma_r_closed(r, a) == pytest.approx(want, rel=1e-13)


def test_gamma_closed_pole():
    with pytest.raises(ZeroDivisionError):
        gamma_r_closed(2, 1)


@pytest.mark.parametrize("r,a,b,want", [(1, 2, 3, 1 / 12), (2, 3, 3, math.pi / 720)])
def test_beta_closed(r, a, b, want):
    assert beta_r_closed(r, a, b) == pytest.approx(want, rel=1e-13)


def test_beta_symmetry():
    assert beta_r_closed(2, 3.2, 4.7) == pytest.approx(beta_r_closed(2, 4.7, 3.2), rel=1e-14)
    assert beta_raw(2, 3.3, 4.1) / beta_raw(2, 4.1, 3.3) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("r,a,tol", [(1, 5, 1e-12), (2, 3, 1e-10), (2, 4.5, 1e-8), (3, 4, 1e-6)])
def test_gamma_quadrature(r, a, tol):
    q = gamma_r_quad(r, a)
    assert q.value_calibrated == pytest.approx(gamma_r_closed(r, a), rel=tol)
    assert q.nodes == 64 and q.est_error < 1e-10


@pytest.mark.parametrize("r,a,b,tol", [(1, 2, 3, 1e-12), (2, 3, 3, 1e-9), (2, 3.5, 2.25, 1e-8)])
def test_beta_quadrature(r, a, b, tol):
    assert beta_r_quad(r, a, b).value_calibrated == pytest.approx(beta_r_closed(r, a, b), rel=tol)


def test_calibration_shared_between_gamma_and_beta():
    assert gamma_r_quad(2, 5).C_r == beta_r_quad(2, 3, 3).C_r == calibration_constant(2)


def test_ratio_independent_of_calibration():
    rep = check_gamma_contiguity(2, [3])
    assert rep.details["ratios"][0]["raw_ratio"] == gamma_raw(2, 4) / gamma_raw(2, 3)


@pytest.mark.parametrize("r,a,want", [(1, 4, 4), (2, 3, 6), (2, 4.5, 15.75)])
def test_gamma_contiguity(r, a, want):
    rep = check_gamma_contiguity(r, [a])
    assert rep.passed and rep.details["ratios"][0]["expected"] == pytest.approx(want)


def test_beta_contiguity_example_value():
    rep = check_beta_contiguity(2, [(3, 3)])
    assert rep.passed
    assert rep.details["ratios"][0]["a_shift"] == pytest.approx(0.2, rel=1e-12)


def test_beta_contiguity_classical():
    rep = check_beta_contiguity(1, [(2, 3)])
    assert rep.details["ratios"][0]["a_shift"] == pytest.approx(2 / 5, rel=1e-12)


def test_beta_composite():
    assert "composite_rel_err" in check_beta_contiguity(2, [(3, 4)]).details["ratios"][0]


def test_closed_form_reports():
    assert check_gamma_closed(2, [3, 3.5, 5]).passed
    assert check_beta_closed(2, [(3, 4), (3.5, 4.5)]).passed


def test_positive_on_real_axis():
    assert all(gamma_r_closed(2, a) > 0 for a in (1.2, 2.5, 7.0))


def test_divergence_flag():
    with pytest.raises(DivergenceError):
        gamma_r_quad(2, 0.9)
    with pytest.raises(DivergenceError):
        beta_raw(2, 3, 1.0)


def test_resource_guard():
    with pytest.raises(ResourceGuardError):
        QuadratureSpec("gauss_legendre_01", 200, 4)
    with pytest.raises(ValueError):
        QuadratureSpec("gauss_legendre_01", 1, 1)


def test_complex_parameter_close_to_closed_form():
    a = 3 + 0.5j
    assert abs(gamma_r_quad(2, a).value_calibrated / gamma_r_closed(2, a) - 1) < 1e-3


def test_monte_carlo_cross_validation():
    assert gamma_r_mc(2, 3, samples=200_000) == pytest.approx(2 * math.pi, rel=2e-2)
    assert beta_r_mc(2, 3, 3, samples=200_000) == pytest.approx(math.pi / 720, rel=2e-2)


def test_result_json_fields():
    assert set(gamma_r_quad(1, 3).to_json()) == {"value_raw", "value_calibrated", "C_r", "nodes", "est_error"}
