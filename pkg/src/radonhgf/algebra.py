"""Exact rational polynomials and the power module ``sum_k p_k * f**(s - k)``.

Coefficients are Python ``int`` or ``fractions.Fraction`` (a Fraction with
denominator 1 is always stored as ``int``). Monomials are flat tuples
``(v1, e1, v2, e2, ...)`` of integer variable codes in increasing order.

Variable order
--------------
A :class:`VarId` is an ``int`` whose value packs ``(kind, i1, i2, i3, i4)``
as ``kind << 24 | i1 << 18 | i2 << 12 | i3 << 6 | i4``. Comparing codes
therefore orders variables first by kind,

    x < t < z < v < u < a < h < s,

then lexicographically by indices. Monomials are ordered graded
lexicographically, an earlier variable being more significant. Only the
choice of leading term in exact division depends on this.
"""
from fractions import Fraction
import heapq
import itertools

from radonhgf import kernels

__all__ = [
    "VarId",
    "S",
    "MultiPoly",
    "PowerElem",
    "poly_arith",
    "poly_partial",
    "pe_differentiate",
    "pe_equal",
    "as_rational",
]

_KIND_CODES = {"x": 1, "t": 2, "z": 3, "v": 4, "u": 5, "a": 6, "h": 7, "s": 15}
_KIND_NAMES = {code: name for name, code in _KIND_CODES.items()}
_ARITY = {"x": 2, "t": 2, "z": 4, "v": 2, "u": 2, "a": 2, "h": 3, "s": 0}


def as_rational(c):
    """Normalise an exact scalar: ``Fraction(n, 1)`` becomes ``n``."""
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, bool) or not isinstance(c, int):
        if isinstance(c, str):
            return as_rational(Fraction(c))
        raise TypeError(f"not an exact rational: {c!r}")
    return c


def _div(a, b):
    q = Fraction(a, b) if isinstance(a, int) and isinstance(b, int) else Fraction(a) / b
    return q.numerator if q.denominator == 1 else q


class VarId(int):
    """Structured variable label stored as a sortable integer code.

    Kinds: ``x(i,j)`` matrix coordinates, ``t(a,b)`` Grassmannian
    coordinates, ``z(block,slot,row,col)`` independent variables,
    ``v(a,b)`` normal-form coordinates, ``u(i,j)`` affine coordinates,
    ``a(i,j)`` a generic matrix, ``h(k,i,j)`` Jordan coefficients and the
    formal exponent ``s``.
    """

    def __new__(cls, kind, *idx):
        if kind not in _KIND_CODES:
            raise ValueError(f"unknown variable kind {kind!r}")
        if len(idx) != _ARITY[kind]:
            raise ValueError(f"{kind} takes {_ARITY[kind]} indices, got {len(idx)}")
        code = _KIND_CODES[kind] << 24
        for pos, i in enumerate(idx):
            if not 0 <= i < 64:
                raise ValueError("variable indices must lie in [0, 64)")
            code |= i << (18 - 6 * pos)
        return super().__new__(cls, code)

    @classmethod
    def x(cls, i, j):
        return cls("x", i, j)

    @classmethod
    def t(cls, a, b):
        return cls("t", a, b)

    @classmethod
    def z(cls, block, slot, row, col):
        return cls("z", block, slot, row, col)

    @classmethod
    def v(cls, a, b):
        return cls("v", a, b)

    @classmethod
    def u(cls, i, j):
        return cls("u", i, j)

    @classmethod
    def a(cls, i, j):
        return cls("a", i, j)

    @classmethod
    def h(cls, k, i, j):
        return cls("h", k, i, j)

    @property
    def kind(self):
        return _KIND_NAMES[int(self) >> 24]

    @property
    def indices(self):
        return decode_var(self)[1]

    def __repr__(self):
        return var_label(self)

    __str__ = __repr__


def decode_var(code):
    name = _KIND_NAMES[int(code) >> 24]
    n = _ARITY[name]
    return name, tuple((int(code) >> (18 - 6 * p)) & 63 for p in range(n))


def var_label(code):
    name, idx = decode_var(code)
    if not idx:
        return name
    return f"{name}({','.join(map(str, idx))})"


S = VarId("s")


def _mono_degree(m):
    return sum(m[1::2])


def _heap_key(m):
    # min-heap key whose minimum is the grlex-maximal monomial
    key = [-_mono_degree(m)]
    for k in range(0, len(m), 2):
        key.append(m[k])
        key.append(-m[k + 1])
    return tuple(key)


def _mono_div(m, d):
    """Quotient ``m / d`` of flat monomials, or None if ``d`` does not divide ``m``."""
    exps = dict(zip(m[::2], m[1::2]))
    for k in range(0, len(d), 2):
        v, e = d[k], d[k + 1]
        have = exps.get(v, 0)
        if have < e:
            return None
        if have == e:
            del exps[v]
        else:
            exps[v] = have - e
    return tuple(itertools.chain.from_iterable(sorted(exps.items())))


class MultiPoly:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        if terms is None:
            terms = {}
        self.terms = {m: as_rational(c) for m, c in terms.items() if c}
        self._hash = None

    @classmethod
    def _raw(cls, terms):
        obj = object.__new__(cls)
        obj.terms = terms
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c):
        c = as_rational(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def var(cls, v, power=1):
        if power < 0:
            raise ValueError("negative exponent")
        return cls._raw({(v, power) if power else (): 1})

    @classmethod
    def zero(cls):
        return cls._raw({})

    @classmethod
    def one(cls):
        return cls._raw({(): 1})

    @staticmethod
    def _coerce(other):
        if isinstance(other, MultiPoly):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return MultiPoly.const(other)
        return None

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant_term(self):
        return self.terms.get((), 0)

    def variables(self):
        return {m[k] for m in self.terms for k in range(0, len(m), 2)}

    def total_degree(self):
        return max((_mono_degree(m) for m in self.terms), default=-1)

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if len(other.terms) > len(self.terms):
            return other + self
        return MultiPoly._raw(kernels.poly_add_scaled(dict(self.terms), other.terms, 1))

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return MultiPoly._raw(kernels.poly_add_scaled(dict(self.terms), other.terms, -1))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = as_rational(other)
            if not other:
                return MultiPoly.zero()
            return MultiPoly._raw({m: as_rational(c * other) for m, c in self.terms.items()})
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return MultiPoly._raw(
            {m: as_rational(c) for m, c in kernels.poly_mul(self.terms, other.terms).items()}
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return MultiPoly._raw({m: _div(c, other) for m, c in self.terms.items()})
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        result, base = MultiPoly.one(), self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def partial(self, v):
        """Exact partial derivative with respect to ``v`` (never the symbol ``s``)."""
        if v == S:
            raise ValueError("the formal exponent s is never differentiated")
        out = {}
        for m, c in self.terms.items():
            for k in range(0, len(m), 2):
                if m[k] == v:
                    e = m[k + 1]
                    dm = m[:k] + m[k + 2 :] if e == 1 else m[: k + 1] + (e - 1,) + m[k + 2 :]
                    out[dm] = out.get(dm, 0) + c * e
                    break
        return MultiPoly(out)

    def evaluate(self, values):
        """Evaluate at ``values`` (mapping variable -> scalar)."""
        total = 0
        for m, c in self.terms.items():
            term = c
            for k in range(0, len(m), 2):
                term = term * values[m[k]] ** m[k + 1]
            total = total + term
        return total

    def substitute(self, values):
        """Replace the variables in ``values`` by polynomials or scalars."""
        out = MultiPoly.zero()
        cache = {}
        for m, c in self.terms.items():
            keep = []
            factor = MultiPoly.const(c)
            for k in range(0, len(m), 2):
                v, e = m[k], m[k + 1]
                if v in values:
                    key = (v, e)
                    if key not in cache:
                        val = values[v]
                        val = val if isinstance(val, MultiPoly) else MultiPoly.const(val)
                        cache[key] = val**e
                    factor = factor * cache[key]
                else:
                    keep.extend((v, e))
            out = out + factor * MultiPoly._raw({tuple(keep): 1})
        return out

    def leading_term(self):
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        m = min(self.terms, key=_heap_key)
        return m, self.terms[m]

    def divide_exact(self, divisor):
        """Exact quotient ``self / divisor`` or None when the division leaves a remainder."""
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return MultiPoly.zero()
        lead_m, lead_c = divisor.leading_term()
        rem = dict(self.terms)
        heap = [(_heap_key(m), m) for m in rem]
        heapq.heapify(heap)
        quotient = {}
        while rem:
            while True:
                _, m = heapq.heappop(heap)
                if m in rem:
                    break
            qm = _mono_div(m, lead_m)
            if qm is None:
                return None
            qc = _div(rem[m], lead_c)
            quotient[qm] = qc
            for dm, dc in divisor.terms.items():
                pm = kernels.mono_mul(qm, dm)
                new = rem.get(pm, 0) - qc * dc
                if new:
                    if pm not in rem:
                        heapq.heappush(heap, (_heap_key(pm), pm))
                    rem[pm] = as_rational(new)
                else:
                    rem.pop(pm, None)
        return MultiPoly(quotient)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=_heap_key):
            c = self.terms[m]
            factors = [
                var_label(m[k]) + (f"^{m[k + 1]}" if m[k + 1] > 1 else "") for k in range(0, len(m), 2)
            ]
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            elif c == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append(f"{c}*" + "*".join(factors))
        return " + ".join(parts).replace("+ -", "- ")


def poly_arith(a, b, kind):
    """``kind`` in {'add', 'sub', 'mul'}."""
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    raise ValueError(f"unknown kind {kind!r}")


def poly_partial(p, v):
    return p.partial(v)


class PowerElem:
    """Finite sum ``sum_k p_k(x, s) * f**(s - k)`` for a fixed nonzero polynomial ``f``.

    In canonical form no stored ``p_k`` with ``k > 0`` is divisible by ``f``;
    divisible terms are divided out and moved to depth ``k - 1``.
    """

    __slots__ = ("base", "terms")

    def __init__(self, base, terms=None):
        if base.is_zero():
            raise ValueError("base of a power element must be nonzero")
        self.base = base
        self.terms = self._canonical(base, terms or {})

    @staticmethod
    def _canonical(base, terms):
        work = {k: p if isinstance(p, MultiPoly) else MultiPoly.const(p) for k, p in terms.items()}
        if any(k < 0 for k in work):
            raise ValueError("depths must be nonnegative")
        out = {}
        while work:
            k = max(work)
            p = work.pop(k)
            if p.is_zero():
                continue
            while k > 0:
                q = p.divide_exact(base)
                if q is None:
                    break
                p, k = q, k - 1
                if k in work:
                    p = p + work.pop(k)
            if not p.is_zero():
                out[k] = p
        return out

    @classmethod
    def power(cls, base, coeff=1):
        """``coeff * f**s``."""
        return cls(base, {0: coeff})

    @classmethod
    def zero(cls, base):
        return cls(base, {})

    def is_zero(self):
        return not self.terms

    def depth(self):
        return max(self.terms, default=0)

    def _check_base(self, other):
        if self.base != other.base:
            raise ValueError("power elements have different bases")

    def __add__(self, other):
        self._check_base(other)
        terms = dict(self.terms)
        for k, p in other.terms.items():
            terms[k] = terms[k] + p if k in terms else p
        return PowerElem(self.base, terms)

    def __neg__(self):
        return PowerElem._trusted(self.base, {k: -p for k, p in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    @classmethod
    def _trusted(cls, base, terms):
        obj = object.__new__(cls)
        obj.base = base
        obj.terms = terms
        return obj

    def mul_poly(self, q):
        q = q if isinstance(q, MultiPoly) else MultiPoly.const(q)
        return PowerElem(self.base, {k: p * q for k, p in self.terms.items()})

    def differentiate(self, v):
        """``d/dv`` via the Leibniz rule on each ``p_k * f**(s - k)``."""
        if v == S:
            raise ValueError("the formal exponent s is never differentiated")
        df = self.base.partial(v)
        s_poly = MultiPoly.var(S)
        out = {}
        for k, p in self.terms.items():
            dp = p.partial(v)
            if not dp.is_zero():
                out[k] = out[k] + dp if k in out else dp
            if not df.is_zero():
                extra = p * df * (s_poly - k)
                out[k + 1] = out[k + 1] + extra if k + 1 in out else extra
        return PowerElem(self.base, out)

    def flatten(self, depth=None):
        """Single polynomial ``P`` with ``self = P * f**(s - depth)``."""
        K = self.depth() if depth is None else depth
        if self.terms and K < self.depth():
            raise ValueError("depth below the element's depth")
        total = MultiPoly.zero()
        powers = {0: MultiPoly.one()}
        for k, p in self.terms.items():
            e = K - k
            if e not in powers:
                powers[e] = self.base**e
            total = total + p * powers[e]
        return total

    def __eq__(self, other):
        if not isinstance(other, PowerElem):
            return NotImplemented
        return pe_equal(self, other)

    __hash__ = None

    def evaluate(self, s_value, values):
        """Numeric value for a concrete exponent and point (``f`` must not vanish there)."""
        f_val = self.base.evaluate(values)
        if f_val == 0:
            raise ZeroDivisionError("base vanishes at the evaluation point")
        point = dict(values)
        point[S] = s_value
        total = 0
        for k, p in self.terms.items():
            e = s_value - k
            if isinstance(f_val, (int, Fraction)) and isinstance(e, int):
                fp = Fraction(f_val) ** e
            else:
                fp = complex(f_val) ** e
            total = total + p.evaluate(point) * fp
        return total

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({p})*f^(s-{k})" if k else f"({p})*f^s" for k, p in sorted(self.terms.items()))


def pe_differentiate(e, v):
    return e.differentiate(v)


def pe_equal(a, b):
    """Equality after bringing both sides to the common depth ``K``."""
    a._check_base(b)
    K = max(a.depth(), b.depth())
    return a.flatten(K) == b.flatten(K)
