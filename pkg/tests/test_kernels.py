import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from radonhgf import _kernels_py, kernels
from tests.conftest import _compiled

monomials = st.dictionaries(st.integers(1, 40), st.integers(1, 5), max_size=4).map(
    lambda d: tuple(x for v in sorted(d) for x in (v, d[v]))
)
polys = st.dictionaries(monomials, st.integers(-5, 5).filter(bool), max_size=6)


def test_backend_is_named():
    assert kernels.BACKEND in {"python", "cython"}


@given(monomials, monomials)
def test_mono_mul_adds_exponents(a, b):
    out = kernels.mono_mul(a, b)
    da, db, do = dict(zip(a[::2], a[1::2])), dict(zip(b[::2], b[1::2])), dict(zip(out[::2], out[1::2]))
    assert list(out[::2]) == sorted(do)
    assert do == {v: da.get(v, 0) + db.get(v, 0) for v in set(da) | set(db)}


@given(polys, polys)
def test_poly_mul_commutes(a, b):
    assert kernels.poly_mul(a, b) == kernels.poly_mul(b, a)


@pytest.mark.skipif(_compiled() is None, reason="compiled extension not built")
@given(polys, polys, st.integers(-3, 3))
@settings(max_examples=50)
def test_backends_agree_on_polynomials(a, b, c):
    ext = _compiled()
    assert ext.poly_mul(a, b) == _kernels_py.poly_mul(a, b)
    assert ext.poly_add_scaled(dict(a), b, c) == _kernels_py.poly_add_scaled(dict(a), b, c)


@pytest.mark.parametrize("d", [0, 1, 2, 3, 4])
def test_jet_mul_matches_backends(kernel_impl, d):
    rng = np.random.default_rng(d)
    a = rng.normal(size=1 << d) + 1j * rng.normal(size=1 << d)
    b = rng.normal(size=1 << d) + 1j * rng.normal(size=1 << d)
    want = np.zeros(1 << d, dtype=complex)
    for m in range(1 << d):
        for s in range(1 << d):
            if s & m == s:
                want[m] += a[s] * b[m ^ s]
    np.testing.assert_allclose(kernel_impl.jet_mul(a, b), want, rtol=1e-14, atol=1e-14)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_grid_sum_matches_brute_force(kernel_impl, r):
    x = np.linspace(0.1, 2.0, 5)
    w = np.linspace(1.0, 0.5, 5)
    grids = np.meshgrid(*([np.arange(5)] * r), indexing="ij")
    idx = np.stack([g.ravel() for g in grids], axis=1)
    total = 0.0
    for row in idx:
        v = np.prod(w[row])
        for k in range(r):
            for l in range(k + 1, r):
                v *= (x[row[k]] - x[row[l]]) ** 2
        total += v
    assert kernel_impl.grid_sum(x, w, r) == pytest.approx(total, rel=1e-13)


def test_pure_python_override_selects_fallback():
    env = dict(os.environ, RADONHGF_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from radonhgf import kernels; print(kernels.BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "python"


def test_pure_python_backend_runs_capelli():
    env = dict(os.environ, RADONHGF_PURE_PYTHON="1")
    code = "from radonhgf.weyl import capelli_check; print(capelli_check(3).status)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "pass"
