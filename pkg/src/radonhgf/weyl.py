"""Normal-ordered differential operators with polynomial coefficients.

A :class:`WeylOp` is ``sum c * x^a * d^b`` with every derivative to the
right of every coefficient. Products are normal-ordered eagerly using

    d^b x^c = sum_k prod_v binom(b_v, k_v) * c_v! / (c_v - k_v)! * x^(c-k) d^(b-k),

so two operators are equal exactly when their term maps are equal.
"""
from functools import lru_cache
from itertools import permutations, product
from math import comb, perm

from radonhgf import kernels
from radonhgf.algebra import MultiPoly, PowerElem, S, VarId, as_rational, var_label
from radonhgf.report import ResourceGuardError, exact_report, timed

DEFAULT_MAX_R = 4


@lru_cache(maxsize=65536)
def _commute(b, c):
    """Normal form of ``d^b x^c`` as a tuple of ``(coeff, x-monomial, d-monomial)``."""
    bd = dict(zip(b[::2], b[1::2]))
    cd = dict(zip(c[::2], c[1::2]))
    common = sorted(set(bd) & set(cd))
    if not common:
        return ((1, c, b),)
    options = [[(k, comb(bd[v], k) * perm(cd[v], k)) for k in range(min(bd[v], cd[v]) + 1)] for v in common]
    out = []
    for choice in product(*options):
        coeff = 1
        xe, de = dict(cd), dict(bd)
        for v, (k, f) in zip(common, choice):
            coeff *= f
            if k:
                xe[v] -= k
                de[v] -= k
        xm = tuple(e for v in sorted(xe) if xe[v] for e in (v, xe[v]))
        dm = tuple(e for v in sorted(de) if de[v] for e in (v, de[v]))
        out.append((coeff, xm, dm))
    return tuple(out)


class WeylOp:
    """Immutable normal-ordered operator; terms map ``(x-monomial, d-monomial) -> coeff``."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: as_rational(c) for k, c in (terms or {}).items() if c}

    @classmethod
    def const(cls, c):
        return cls({((), ()): c})

    @classmethod
    def coef(cls, poly):
        """Multiplication by the polynomial ``poly``."""
        return cls({(m, ()): c for m, c in poly.terms.items()})

    @classmethod
    def deriv(cls, v, order=1):
        if v == S:
            raise ValueError("the formal exponent s is never differentiated")
        return cls({((), (v, order)): 1})

    @classmethod
    def var(cls, v):
        return cls({((v, 1), ()): 1})

    def is_zero(self):
        return not self.terms

    def order(self):
        return max((sum(dm[1::2]) for _, dm in self.terms), default=0)

    def _lift(self, other):
        if isinstance(other, WeylOp):
            return other
        if isinstance(other, MultiPoly):
            return WeylOp.coef(other)
        return WeylOp.const(other)

    def __add__(self, other):
        other = self._lift(other)
        terms = dict(self.terms)
        kernels.poly_add_scaled(terms, other.terms, 1)
        return WeylOp(terms)

    __radd__ = __add__

    def __neg__(self):
        return WeylOp({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        return weyl_mul(self, self._lift(other))

    def __rmul__(self, other):
        return weyl_mul(self._lift(other), self)

    def __eq__(self, other):
        if not isinstance(other, WeylOp):
            other = self._lift(other)
        return self.terms == other.terms

    __hash__ = None

    def apply(self, target):
        """Act on a :class:`MultiPoly` or a :class:`PowerElem`."""
        if isinstance(target, PowerElem):
            return apply_op(self, target)
        return apply_op_poly(self, target)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (xm, dm), c in sorted(self.terms.items()):
            xs = MultiPoly._raw({xm: c})
            ds = "*".join(
                f"d[{var_label(dm[k])}]" + (f"^{dm[k + 1]}" if dm[k + 1] > 1 else "")
                for k in range(0, len(dm), 2)
            )
            parts.append(f"({xs})" + (f"*{ds}" if ds else ""))
        return " + ".join(parts)


def weyl_mul(a, b):
    """Normal-ordered product ``a * b`` (apply ``b`` first, then ``a``)."""
    out = {}
    for (xa, da), ca in a.terms.items():
        for (xc, dc), cc in b.terms.items():
            base = ca * cc
            for coeff, xm, dm in _commute(da, xc):
                key = (kernels.mono_mul(xa, xm), kernels.mono_mul(dm, dc))
                val = out.get(key, 0) + base * coeff
                if val:
                    out[key] = val
                else:
                    out.pop(key, None)
    return WeylOp(out)


def _sign(perm_):
    inv = sum(1 for i in range(len(perm_)) for j in range(i + 1, len(perm_)) if perm_[i] > perm_[j])
    return -1 if inv % 2 else 1


def column_det(m):
    """``sum_sigma sgn(sigma) m[sigma(1)][1] m[sigma(2)][2] ... m[sigma(r)][r]``, factors in column order."""
    r = len(m)
    if any(len(row) != r for row in m):
        raise ValueError("column determinant needs a square matrix")
    total = WeylOp()
    for sigma in permutations(range(r)):
        term = WeylOp.const(_sign(sigma))
        for col, row in enumerate(sigma):
            term = term * m[row][col]
        total = total + term
    return total


def row_det(m):
    """Row-order expansion; agrees with :func:`column_det` for commuting entries."""
    r = len(m)
    total = WeylOp()
    for sigma in permutations(range(r)):
        term = WeylOp.const(_sign(sigma))
        for row, col in enumerate(sigma):
            term = term * m[row][col]
        total = total + term
    return total


def poly_det(m):
    """Leibniz determinant of a matrix of commuting ring elements."""
    r = len(m)
    total = None
    for sigma in permutations(range(r)):
        term = _sign(sigma)
        for row, col in enumerate(sigma):
            term = term * m[row][col]
        total = term if total is None else total + term
    return total


def _guard(r, max_r):
    if r < 1:
        raise ValueError("r must be a positive integer")
    if max_r is not None and r > max_r:
        raise ResourceGuardError(f"r={r} exceeds the resource guard r <= {max_r}; lift the guard to proceed")


def x_matrix(r):
    return [[MultiPoly.var(VarId.x(i, j)) for j in range(1, r + 1)] for i in range(1, r + 1)]


def e_prime(i, j, r):
    """Left-invariant vector field ``E'_{i,j} = sum_a x_{a,i} d_{a,j}``."""
    return WeylOp({((VarId.x(a, i), 1), (VarId.x(a, j), 1)): 1 for a in range(1, r + 1)})


def capelli_lhs(r, max_r=DEFAULT_MAX_R, shift_perturb=0):
    """Column determinant of ``E'_{i,j} + (r - j) delta_{i,j}``.

    ``shift_perturb`` adds a constant to every diagonal shift (negative control).
    """
    _guard(r, max_r)
    mat = [
        [e_prime(i, j, r) + ((r - j + shift_perturb) if i == j else 0) for j in range(1, r + 1)]
        for i in range(1, r + 1)
    ]
    return column_det(mat)


def det_x_op(r):
    return WeylOp.coef(poly_det(x_matrix(r)))


def det_d_op(r):
    return column_det([[WeylOp.deriv(VarId.x(i, j)) for j in range(1, r + 1)] for i in range(1, r + 1)])


def capelli_check(r, max_r=DEFAULT_MAX_R, shift_perturb=0):
    holder = {}
    with timed(holder):
        lhs = capelli_lhs(r, max_r=max_r, shift_perturb=shift_perturb)
        rhs = det_x_op(r) * det_d_op(r)
        equal = lhs == rhs
    rep = exact_report(
        "capelli",
        {"r": r, "shift_perturb": shift_perturb},
        equal,
        details={"lhs_terms": len(lhs.terms), "rhs_terms": len(rhs.terms)},
    )
    rep.elapsed_ms = holder["ms"]
    return rep


def apply_op_poly(op, p):
    cache = {(): p}

    def deriv(dm):
        if dm not in cache:
            v, e = dm[-2], dm[-1]
            prev = dm[:-2] if e == 1 else dm[:-1] + (e - 1,)
            cache[dm] = deriv(prev).partial(v)
        return cache[dm]

    total = MultiPoly.zero()
    for (xm, dm), c in op.terms.items():
        d = deriv(dm)
        if not d.is_zero():
            total = total + MultiPoly._raw({xm: c}) * d
    return total


def apply_op(op, e):
    """Exact action of ``op`` on a power element, with shared derivative prefixes."""
    cache = {(): e}

    def deriv(dm):
        if dm not in cache:
            v, k = dm[-2], dm[-1]
            prev = dm[:-2] if k == 1 else dm[:-1] + (k - 1,)
            cache[dm] = deriv(prev).differentiate(v)
        return cache[dm]

    terms = {}
    for (xm, dm), c in op.terms.items():
        d = deriv(dm)
        coeff = MultiPoly._raw({xm: c})
        for k, p in d.terms.items():
            prod_ = coeff * p
            terms[k] = terms[k] + prod_ if k in terms else prod_
    return PowerElem(e.base, terms)


def apply_op_exp(op, phi, p):
    """Polynomial ``q`` with ``op(p * exp(phi)) = q * exp(phi)``."""
    cache = {(): p}

    def deriv(dm):
        if dm not in cache:
            v, k = dm[-2], dm[-1]
            prev = dm[:-2] if k == 1 else dm[:-1] + (k - 1,)
            q = deriv(prev)
            cache[dm] = q.partial(v) + q * phi.partial(v)
        return cache[dm]

    total = MultiPoly.zero()
    for (xm, dm), c in op.terms.items():
        total = total + MultiPoly._raw({xm: c}) * deriv(dm)
    return total


def b_function(r, shift=0):
    """``b(s + shift)`` with ``b(s) = s (s+1) ... (s+r-1)``, as a polynomial in ``s``."""
    out = MultiPoly.one()
    s = MultiPoly.var(S)
    for k in range(r):
        out = out * (s + (shift + k))
    return out


def b_value(r, x):
    """Numeric ``b(x) = x (x+1) ... (x+r-1)``."""
    out = 1
    for k in range(r):
        out = out * (x + k)
    return out


def pochhammer_coefficients(r):
    """Unsigned Stirling numbers ``c(r, k)``: ``s (s+1) ... (s+r-1) = sum_k c(r, k) s^k``."""
    row = [1]
    for n in range(r):
        row = [(n * row[k] if k < len(row) else 0) + (row[k - 1] if k else 0) for k in range(len(row) + 1)]
    return row


def cayley_check(r, max_r=DEFAULT_MAX_R, b_perturb=0):
    """``det(d) f^s == b(s) f^(s-1)`` for ``f = det(x)`` with ``s`` formal."""
    _guard(r, max_r)
    holder = {}
    with timed(holder):
        f = poly_det(x_matrix(r))
        lhs = apply_op(det_d_op(r), PowerElem.power(f))
        b = b_function(r) + b_perturb
        rhs = PowerElem(f, {1: b})
        equal = lhs == rhs
        found, coeffs = None, None
        if set(lhs.terms) == {1} and lhs.terms[1].variables() <= {S}:
            found = str(lhs.terms[1])
            coeffs = [lhs.terms[1].terms.get((S, k) if k else (), 0) for k in range(r + 1)]
        stirling = pochhammer_coefficients(r)
        coeffs_ok = coeffs == stirling
    rep = exact_report(
        "cayley",
        {"r": r, "b_perturb": b_perturb},
        equal and coeffs_ok,
        details={
            "b_expected": str(b),
            "b_found": found,
            "coefficients_found": coeffs,
            "pochhammer_coefficients": stirling,
        },
    )
    rep.elapsed_ms = holder["ms"]
    return rep


def capelli2_check(r):
    """``E'_{i,j} f^s`` is 0 for ``i != j`` and ``s f^s`` for ``i == j``, all ``i, j``."""
    holder = {}
    failures = []
    with timed(holder):
        f = poly_det(x_matrix(r))
        fs = PowerElem.power(f)
        s_fs = PowerElem.power(f, MultiPoly.var(S))
        for i in range(1, r + 1):
            for j in range(1, r + 1):
                got = apply_op(e_prime(i, j, r), fs)
                want = s_fs if i == j else PowerElem.zero(f)
                if not got == want:
                    failures.append([i, j])
    rep = exact_report("capelli-2", {"r": r}, not failures, details={"failures": failures})
    rep.elapsed_ms = holder["ms"]
    return rep
