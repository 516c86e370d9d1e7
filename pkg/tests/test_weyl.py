import pytest

from radonhgf.algebra import MultiPoly, PowerElem, S, VarId
from radonhgf.report import ResourceGuardError
from radonhgf.weyl import (
    WeylOp,
    apply_op_exp,
    apply_op_poly,
    b_function,
    b_value,
    capelli2_check,
    capelli_check,
    cayley_check,
    column_det,
    e_prime,
    pochhammer_coefficients,
    row_det,
)

x, y = VarId.x(1, 1), VarId.x(1, 2)


def test_heisenberg_relation():
    d, X = WeylOp.deriv(x), WeylOp.var(x)
    assert d * X - X * d == WeylOp.const(1)


def test_normal_ordering_of_d2_x2():
    d2, x2 = WeylOp.deriv(x, 2), WeylOp.coef(MultiPoly.var(x, 2))
    want = {((x, 2), (x, 2)): 1, ((x, 1), (x, 1)): 4, ((), ()): 2}
    assert (d2 * x2).terms == want


def test_distinct_variables_commute():
    assert WeylOp.deriv(x) * WeylOp.var(y) == WeylOp.var(y) * WeylOp.deriv(x)


def test_apply_matches_composition():
    p = MultiPoly.var(x, 3) * MultiPoly.var(y, 2)
    a, b = WeylOp.deriv(x) + WeylOp.var(y), WeylOp.var(x) * WeylOp.deriv(y)
    assert apply_op_poly(a * b, p) == apply_op_poly(a, apply_op_poly(b, p))


def test_apply_op_exp_first_order():
    phi = MultiPoly.var(x) * MultiPoly.var(y)
    assert apply_op_exp(WeylOp.deriv(x), phi, MultiPoly.one()) == MultiPoly.var(y)


def test_column_and_row_det_differ_for_noncommuting_entries():
    m = [[WeylOp.var(x), WeylOp.deriv(x)], [WeylOp.var(x), WeylOp.var(y)]]
    assert column_det(m) - row_det(m) == WeylOp.const(1)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_capelli(r):
    assert capelli_check(r).passed


def test_capelli_guard():
    with pytest.raises(ResourceGuardError):
        capelli_check(3, max_r=2)


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_cayley(r):
    assert cayley_check(r).passed


@pytest.mark.parametrize("r,coeffs", [(1, [0, 1]), (2, [0, 1, 1]), (3, [0, 2, 3, 1]), (4, [0, 6, 11, 6, 1])])
def test_pochhammer_coefficients(r, coeffs):
    assert pochhammer_coefficients(r) == coeffs
    b = b_function(r)
    assert [b.terms.get((S, k) if k else (), 0) for k in range(r + 1)] == coeffs


def test_b_value_shift():
    assert b_value(3, 2) == 24
    assert b_function(2, shift=1) == (MultiPoly.var(S) + 1) * (MultiPoly.var(S) + 2)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_capelli2(r):
    assert capelli2_check(r).passed


def test_e_prime_off_diagonal_kills_det_power():
    from radonhgf.weyl import apply_op, poly_det, x_matrix

    f = poly_det(x_matrix(2))
    assert apply_op(e_prime(1, 2, 2), PowerElem.power(f)).is_zero()


@pytest.mark.parametrize("r", [1, 2])
def test_negative_controls_fail(r):
    assert not capelli_check(r, shift_perturb=1).passed
    assert not cayley_check(r, b_perturb=1).passed
