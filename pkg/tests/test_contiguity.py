import json
from fractions import Fraction

import numpy as np
import pytest

from radonhgf import linalg
from radonhgf.contiguity import (
    ZPoint,
    build_operator_conf,
    build_operator_nonconf,
    cartan_element,
    check_character_covariance,
    check_conf_integrand,
    check_covariance_lemma,
    check_nonconf_integrand,
    check_normal_forms,
    check_operator_structure,
    check_proof_identities,
    check_u_factor,
    conf_factor,
    normal_form_3blocks,
    normal_form_point,
    operators_commute,
    random_z_lambda_point,
    root_basis,
    u_factor,
)
from radonhgf.jordan import AlphaParams, Partition
from radonhgf.report import ResourceGuardError
from radonhgf.weyl import b_function

LAMS = [(1, 1, 1), (2, 1), (2, 2), (3, 1)]


def pairs(n):
    return [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]


def test_root_basis_identity_partition():
    assert root_basis(Partition((1, 1, 1)), 1, 1, 3) == [(0, 2)]


def test_root_basis_corner_block():
    assert root_basis(Partition((2, 2)), 2, 1, 2) == [(0, 6), (0, 7), (1, 6), (1, 7)]


@pytest.mark.parametrize("lam", LAMS)
@pytest.mark.parametrize("r", [1, 2])
def test_root_vectors_are_eigenvectors(lam, r):
    lam = Partition(lam)
    rng = np.random.default_rng(1)
    coeffs = [[float(x) for x in rng.normal(size=n)] for n in lam.parts]
    A = cartan_element(lam, r, coeffs)
    N = lam.n * r
    for i, j in pairs(lam.length):
        basis = root_basis(lam, r, i, j)
        assert len(basis) == r * r
        for row, col in basis:
            X = [[1.0 if (a, b) == (row, col) else 0.0 for b in range(N)] for a in range(N)]
            comm = linalg.sub(linalg.matmul(A, X), linalg.matmul(X, A))
            want = linalg.scale(coeffs[i - 1][0] - coeffs[j - 1][0], X)
            assert linalg.max_abs_diff(comm, want) < 1e-12


def test_diagonal_shift_rejected():
    with pytest.raises(ValueError):
        root_basis(Partition((2, 1)), 1, 1, 1)
    with pytest.raises(ValueError):
        build_operator_nonconf(2, 2, 1, 2)


@pytest.mark.parametrize("r,m", [(1, 2), (2, 3), (2, 4)])
def test_conf_operator_reduces_to_nonconf(r, m):
    assert check_operator_structure(r, m).passed


def test_operator_entries_commute_confluent():
    assert operators_commute(build_operator_conf(Partition((2, 2)), 1, 2, 2, 4))


@pytest.mark.parametrize("r,m", [(1, 2), (1, 3), (2, 3), (2, 4)])
@pytest.mark.parametrize("i,j", [(1, 2), (2, 1), (3, 1)])
def test_nonconf_symbolic(r, m, i, j):
    assert check_nonconf_integrand(r, m, i, j, n=3).passed


def test_nonconf_fast_mode():
    assert check_nonconf_integrand(2, 4, 1, 2, fast=True).passed


def test_nonconf_guard():
    with pytest.raises(ResourceGuardError):
        check_nonconf_integrand(3, 4, 1, 2)


@pytest.mark.parametrize("lam", LAMS)
@pytest.mark.parametrize("r", [1, 2])
def test_conf_integrand(lam, r):
    m = max(r + 1, 2 * r)
    for i, j in pairs(len(lam)):
        rep = check_conf_integrand(lam, r, m, i, j, trials=6, seed=3)
        assert rep.passed, rep.summary_line()


def test_conf_integrand_kummer_example():
    assert check_conf_integrand((2, 1), 1, 2, 1, 2, trials=20, tol=1e-9).passed


def test_conf_integrand_mp_precision():
    rep = check_conf_integrand((2, 1), 1, 2, 2, 1, trials=2, precision="mp", tol=1e-20)
    assert rep.passed, rep.max_rel_err


@pytest.mark.parametrize("lam,j", [((2, 2), 2), ((1, 1, 1), 3)])
def test_exponent_perturbation_fails(lam, j):
    assert not check_conf_integrand(lam, 2, 4, 1, j, trials=3, exponent_perturb=1).passed


def test_case_one_factor_is_b_function():
    alpha = AlphaParams([(0.3 + 0.2j,), (1.7,), (-4.0 - 0.2j,)])
    f = conf_factor(Partition((1, 1, 1)), 2, 2, alpha)
    assert f == b_function(2).evaluate({b_function(2).variables().pop(): 1.7})
    assert f == pytest.approx(1.7 * 2.7)


def test_case_two_factor_is_power():
    alpha = AlphaParams([(0.5, 2.0), (-4.5, 3.0)])
    assert conf_factor(Partition((2, 2)), 2, 2, alpha) == 9.0


@pytest.mark.parametrize("r,m", [(1, 2), (1, 3), (2, 3)])
def test_covariance_lemma(r, m):
    assert check_covariance_lemma(r, m, trials=6, seed=5).passed


@pytest.mark.parametrize("lam,r,m", [((2, 1), 1, 2), ((2, 1), 2, 4), ((1, 1, 1), 1, 3), ((3, 1), 2, 3)])
def test_character_covariance(lam, r, m):
    assert check_character_covariance(lam, r, m, trials=6).passed


def test_normal_form_of_representative():
    for lam in [(1, 1, 1), (2, 1), (3,)]:
        x = normal_form_point(lam, 2)
        nf = normal_form_3blocks(lam, x)
        assert nf.g == linalg.identity(4)


def test_beta_variant_resolution():
    one = check_normal_forms((1, 1, 1), 1, draws=10, seed=2).details["variant_outcomes"]
    two = check_normal_forms((1, 1, 1), 2, draws=10, seed=2).details["variant_outcomes"]
    assert one["statement"]["failed"] == 0 and one["proof"]["failed"] == 0
    assert two["statement"]["held"] == 0 and two["proof"]["failed"] == 0


@pytest.mark.parametrize("variant", ["1", "2"])
def test_gamma_variants(variant):
    assert check_normal_forms((2, 1), 2, draws=15, seed=4, variant=variant).passed


def test_normal_form_rejects_degenerate_point():
    x = normal_form_point((1, 1, 1), 1)
    bad = x.replace(2, 0, x.slot(1, 0))
    with pytest.raises(ValueError):
        normal_form_3blocks((1, 1, 1), bad)


def test_float_normal_form_reconstructs():
    rng = np.random.default_rng(9)
    z = random_z_lambda_point((2, 1), 2, rng, exact=False)
    assert normal_form_3blocks((2, 1), z, "1").max_abs_err < 1e-12


def test_u_factor_at_representative():
    alpha = AlphaParams([(0.3,), (0.1 + 0.2j,), (-2.4 - 0.2j,)])
    out = u_factor((1, 1, 1), normal_form_point((1, 1, 1), 1), alpha)
    assert abs(out["value"] - 1) < 1e-15
    assert out["variant"] == "proof"


def test_u_factor_variant_two_formula():
    rng = np.random.default_rng(11)
    z = random_z_lambda_point((2, 1), 1, rng, exact=False)
    a0, a1 = 0.4 + 0.1j, -0.8
    alpha = AlphaParams([(a0, a1), (-2 - a0,)])
    nf = normal_form_3blocks((2, 1), z, "2")
    v1, v2 = nf.v[0][0], nf.v[1][0]
    d = linalg.det(linalg.hstack(z.slot(1, 0), z.slot(2, 0)))
    import cmath

    want = d**-1 * cmath.exp((a0 + 1) * cmath.log(v2)) * cmath.exp(a1 * v1)
    got = u_factor((2, 1), z, alpha, "2")["value"]
    assert abs(got / want - 1) < 1e-12


@pytest.mark.parametrize("r", [1, 2])
def test_u_factor_homogeneity(r):
    assert check_u_factor(r, trials=5).passed


@pytest.mark.parametrize("kind", ["beta_13", "beta_12", "beta_23", "gamma_21", "gamma_12"])
@pytest.mark.parametrize("r", [1, 2])
def test_proof_identities(kind, r):
    assert check_proof_identities(kind, r, trials=4).passed


@pytest.mark.parametrize("r", [1, 2])
def test_expdet_exact(r):
    rep = check_proof_identities("expdet", r)
    assert rep.exact is True and rep.passed


def test_expdet_numeric_r3():
    assert check_proof_identities("expdet", 3, trials=10, tol=1e-10).passed


def test_zpoint_json_roundtrip():
    z = ZPoint(Partition((2, 1)), 1, 2, [[[[Fraction(1, 2)], [3]], [[1j], [2]]], [[[0], [1]]]])
    back = ZPoint.from_json(json.loads(json.dumps(z.to_json())))
    assert back.blocks == z.blocks


def test_zpoint_json_rejects_bad_shape():
    with pytest.raises(ValueError):
        ZPoint.from_json({"lambda": [1], "r": 1, "m": 2, "blocks": [[["1"]]]})
