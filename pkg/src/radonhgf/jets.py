"""Multilinear jets: truncated Taylor values in ``d`` nilpotent directions.

A :class:`Jet` stores ``2**d`` coefficients indexed by subsets of the
directions (bit masks); ``eps_k**2 = 0`` while products of distinct
``eps_k`` are kept. Evaluating a field at ``point + sum eps_k * dir_k``
and reading the coefficient of the full mask gives the mixed directional
derivative along all ``d`` directions.

Two scalar modes are available: complex double (default) and ``"mp"``,
which carries :mod:`mpmath` complex numbers at a configurable working
precision for tolerance studies.
"""
import cmath
from contextlib import contextmanager
from math import factorial

import mpmath
import numpy as np

from radonhgf import kernels

MAX_DIMS = 4
MP_DPS = 32


def _is_mp(x):
    return isinstance(x, (mpmath.mpc, mpmath.mpf))


class Jet:
    __slots__ = ("coeffs", "dims")

    def __init__(self, coeffs, dims=None):
        arr = np.asarray(coeffs)
        if arr.dtype != object:
            arr = arr.astype(np.complex128, copy=False)
        size = len(arr)
        if dims is None:
            dims = size.bit_length() - 1
        if size != 1 << dims:
            raise ValueError("a jet in d directions has 2**d coefficients")
        if dims > MAX_DIMS:
            raise ValueError(f"at most {MAX_DIMS} directions are supported")
        self.coeffs = arr
        self.dims = dims

    @classmethod
    def constant(cls, c, dims, mp=False):
        arr = np.zeros(1 << dims, dtype=object if mp else np.complex128)
        if mp:
            arr[:] = mpmath.mpc(0)
            arr[0] = mpmath.mpc(c)
        else:
            arr[0] = c
        return cls(arr, dims)

    @classmethod
    def variable(cls, c, k, dims, mp=False):
        """``c + eps_k``."""
        out = cls.constant(c, dims, mp)
        out.coeffs[1 << k] = mpmath.mpc(1) if mp else 1.0
        return out

    @property
    def is_mp(self):
        return self.coeffs.dtype == object

    @property
    def const(self):
        return self.coeffs[0]

    def top(self):
        """Coefficient of ``eps_1 * ... * eps_d``."""
        return self.coeffs[-1]

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.dims != self.dims:
                raise ValueError("jets with different numbers of directions")
            return other
        return None

    def _promote(self, other):
        """Bring a complex-mode operand up to mp mode when the other side is mp."""
        if self.is_mp and not other.is_mp:
            return Jet(np.array([mpmath.mpc(complex(c)) for c in other.coeffs], dtype=object), other.dims)
        return other

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            out = self.coeffs.copy()
            out[0] = out[0] + other
            return Jet(out, self.dims)
        a, b = self._promote(o), o._promote(self)
        return Jet(b.coeffs + a.coeffs, self.dims)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.coeffs, self.dims)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, Jet):
                raise ValueError("jets with different numbers of directions")
            return Jet(self.coeffs * other, self.dims)
        a, b = o._promote(self), self._promote(o)
        return Jet(kernels.jet_mul(a.coeffs, b.coeffs), self.dims)

    __rmul__ = __mul__

    def reciprocal(self):
        c = self.const
        if c == 0:
            raise ZeroDivisionError("jet with zero constant term")
        # 1/(c + n) = (1/c) * sum_k (-n/c)^k, n nilpotent of order dims + 1
        n = self - c
        q = n * (-1 / c)
        term = Jet.constant(1, self.dims, self.is_mp)
        total = term
        for _ in range(self.dims):
            term = term * q
            total = total + term
        return total * (1 / c)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet(self.coeffs / other, self.dims)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __abs__(self):
        return abs(self.const)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return self.dims == 0 and self.const == other
        return bool(np.all(self.coeffs == o.coeffs))

    __hash__ = None

    def __repr__(self):
        return f"Jet({list(self.coeffs)})"


def _series(a, derivs):
    """``sum_k derivs[k] / k! * n**k`` with ``n = a - const``."""
    n = a - a.const
    total = Jet.constant(derivs[0], a.dims, a.is_mp)
    power = Jet.constant(1, a.dims, a.is_mp)
    for k in range(1, a.dims + 1):
        power = power * n
        total = total + power * (derivs[k] / factorial(k))
    return total


def jet_fun(a, f, exponent=None):
    """Apply ``exp``, ``log`` or ``pow`` (with ``exponent``) to a jet.

    ``log`` and ``pow`` use the principal branch at the constant term.
    """
    c = a.const
    d = a.dims
    mp = a.is_mp
    if f == "exp":
        e = mpmath.exp(c) if mp else cmath.exp(c)
        return _series(a, [e] * (d + 1))
    if c == 0:
        raise ZeroDivisionError(f"{f} of a jet with zero constant term")
    if f == "log":
        derivs = [mpmath.log(c) if mp else cmath.log(c)]
        for k in range(1, d + 1):
            derivs.append((-1) ** (k + 1) * factorial(k - 1) / c**k)
        return _series(a, derivs)
    if f == "pow":
        if exponent is None:
            raise ValueError("pow needs an exponent")
        base = mpmath.power(c, exponent) if mp else scalar_pow(complex(c), exponent)
        derivs = []
        falling = 1
        for k in range(d + 1):
            derivs.append(falling * base / c**k)
            falling = falling * (exponent - k)
        return _series(a, derivs)
    raise ValueError(f"unknown jet function {f!r}")


def scalar_exp(x):
    if isinstance(x, Jet):
        return jet_fun(x, "exp")
    if _is_mp(x):
        return mpmath.exp(x)
    return cmath.exp(x)


def scalar_log(x):
    """Principal logarithm."""
    if isinstance(x, Jet):
        return jet_fun(x, "log")
    if _is_mp(x):
        return mpmath.log(x)
    return cmath.log(x)


def scalar_pow(x, e):
    """Principal power ``exp(e * Log x)``."""
    if isinstance(x, Jet):
        return jet_fun(x, "pow", e)
    if _is_mp(x) or _is_mp(e):
        return mpmath.power(mpmath.mpc(x), e)
    if isinstance(e, int) and not isinstance(e, bool):
        return complex(x) ** e
    return cmath.exp(e * cmath.log(x))


def jet_arith(a, b, kind):
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        return a / b
    raise ValueError(f"unknown kind {kind!r}")


def mixed_derivative(f, point, directions, mp=False):
    """``d/d dir_1 ... d/d dir_d f`` at ``point``.

    ``point`` and every direction are flat sequences of equal length; ``f``
    receives the perturbed point as a list of jets and must return a jet.
    """
    d = len(directions)
    if d > MAX_DIMS:
        raise ValueError(f"at most {MAX_DIMS} directions are supported")
    n = len(point)
    if any(len(v) != n for v in directions):
        raise ValueError("directions must match the point dimension")
    conv = mpmath.mpc if mp else complex
    args = []
    for idx in range(n):
        coeffs = np.zeros(1 << d, dtype=object if mp else np.complex128)
        if mp:
            coeffs[:] = mpmath.mpc(0)
        coeffs[0] = conv(point[idx])
        for k, v in enumerate(directions):
            coeffs[1 << k] = conv(v[idx])
        args.append(Jet(coeffs, d))
    out = f(args)
    if isinstance(out, Jet):
        return out.top()
    return 0 if d else out


@contextmanager
def mp_precision(dps=MP_DPS):
    """Temporarily raise :mod:`mpmath` working precision."""
    with mpmath.workdps(dps):
        yield
