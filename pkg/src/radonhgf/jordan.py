"""Truncated matrix polynomials ``Mat(r)[w]/(w^p)`` and the characters built on them.

An invertible element ``h = h_0 + h_1 w + ... + h_{p-1} w^{p-1}`` is the
block upper-triangular Toeplitz matrix with blocks ``h_0, h_1, ...``. For a
unipotent element (``h_0 = 1``) the truncated logarithm has coefficients
``theta_k(h)``, and the block character is

    chi_p(h; alpha) = det(h_0)^alpha_0 * exp(sum_{i>=1} alpha_i Tr theta_i(h_0^{-1} h)).

Complex powers use the principal branch of ``log det h_0``.
"""
from dataclasses import dataclass, field
from fractions import Fraction
import math

from radonhgf import linalg
from radonhgf.algebra import MultiPoly, VarId
from radonhgf.jets import scalar_exp, scalar_log, scalar_pow
from radonhgf.report import exact_report, timed

DEFAULT_INT_TOL = 1e-9


@dataclass(frozen=True)
class Partition:
    parts: tuple

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if not parts or any(p < 1 for p in parts):
            raise ValueError("partition parts must be positive integers")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError("partition parts must be nonincreasing")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def parse(cls, text):
        return cls(tuple(int(x) for x in str(text).replace(" ", "").split(",") if x))

    @property
    def n(self):
        return sum(self.parts)

    @property
    def length(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __str__(self):
        return ",".join(map(str, self.parts))


def _exact_ring(x):
    return isinstance(x, (int, Fraction, MultiPoly))


def _coef(c, sample):
    """Ring-appropriate form of the rational constant ``c``."""
    return Fraction(c) if _exact_ring(sample) else float(c)


class TruncMatPoly:
    """Element of ``Mat(r)[w]/(w^p)``; ``coeffs[k]`` is the ``r x r`` matrix of ``w^k``."""

    __slots__ = ("r", "p", "coeffs")

    def __init__(self, coeffs):
        if not coeffs:
            raise ValueError("need at least one coefficient")
        r = len(coeffs[0])
        for c in coeffs:
            if len(c) != r or any(len(row) != r for row in c):
                raise ValueError("coefficients must all be r x r")
        self.r = r
        self.p = len(coeffs)
        self.coeffs = [[list(row) for row in c] for c in coeffs]

    @classmethod
    def identity(cls, r, p, one=1, zero=0):
        return cls([linalg.identity(r, one, zero)] + [linalg.zeros(r, r, zero) for _ in range(p - 1)])

    @classmethod
    def zero(cls, r, p, zero=0):
        return cls([linalg.zeros(r, r, zero) for _ in range(p)])

    def _check(self, other):
        if (self.r, self.p) != (other.r, other.p):
            raise ValueError(f"shape mismatch: (r={self.r}, p={self.p}) vs (r={other.r}, p={other.p})")

    def __add__(self, other):
        self._check(other)
        return TruncMatPoly([linalg.add(a, b) for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        self._check(other)
        return TruncMatPoly([linalg.sub(a, b) for a, b in zip(self.coeffs, other.coeffs)])

    def __mul__(self, other):
        if not isinstance(other, TruncMatPoly):
            return TruncMatPoly([linalg.scale(other, c) for c in self.coeffs])
        self._check(other)
        out = []
        for k in range(self.p):
            acc = linalg.matmul(self.coeffs[0], other.coeffs[k])
            for i in range(1, k + 1):
                acc = linalg.add(acc, linalg.matmul(self.coeffs[i], other.coeffs[k - i]))
            out.append(acc)
        return TruncMatPoly(out)

    def __eq__(self, other):
        if not isinstance(other, TruncMatPoly):
            return NotImplemented
        return (self.r, self.p) == (other.r, other.p) and self.coeffs == other.coeffs

    __hash__ = None

    def __getitem__(self, k):
        return self.coeffs[k]

    def scalar_sample(self):
        """An entry that reveals the scalar ring (plain ints are ambiguous)."""
        for c in self.coeffs:
            for row in c:
                for x in row:
                    if not isinstance(x, int):
                        return x
        return 0

    def __repr__(self):
        return f"TruncMatPoly(r={self.r}, p={self.p}, coeffs={self.coeffs})"


def tmp_arith(a, b, kind):
    if kind == "add":
        return a + b
    if kind == "mul":
        return a * b
    raise ValueError(f"unknown kind {kind!r}")


def tmp_inverse(h):
    g0 = linalg.inverse(h.coeffs[0])
    gs = [g0]
    for k in range(1, h.p):
        acc = linalg.matmul(h.coeffs[1], gs[k - 1])
        for i in range(2, k + 1):
            acc = linalg.add(acc, linalg.matmul(h.coeffs[i], gs[k - i]))
        gs.append(linalg.neg(linalg.matmul(g0, acc)))
    return TruncMatPoly(gs)


def _is_identity(m):
    return all((x == 1) if i == j else (x == 0) for i, row in enumerate(m) for j, x in enumerate(row))


def _is_zero_mat(m):
    return all(x == 0 for row in m for x in row)


def _powers_series(x, weights):
    """``sum_k weights[k] * x^k`` for nilpotent ``x`` (``x_0 = 0``)."""
    sample = x.scalar_sample()
    one = TruncMatPoly.identity(x.r, x.p)
    total = one * _coef(weights[0], sample) if weights[0] else TruncMatPoly.zero(x.r, x.p)
    power = one
    for k in range(1, x.p):
        power = power * x
        if weights[k]:
            total = total + power * _coef(weights[k], sample)
    return total


def tmp_log(h, check=True):
    """Truncated logarithm of a unipotent element."""
    if check and not _is_identity(h.coeffs[0]):
        raise ValueError("log needs h_0 = 1")
    x = TruncMatPoly([linalg.zeros(h.r, h.r)] + [list(map(list, c)) for c in h.coeffs[1:]])
    weights = [0] + [Fraction((-1) ** (k + 1), k) for k in range(1, h.p)]
    return _powers_series(x, weights)


def tmp_exp(x, check=True):
    if check and not _is_zero_mat(x.coeffs[0]):
        raise ValueError("exp needs x_0 = 0")
    weights = [Fraction(1, math.factorial(k)) for k in range(x.p)]
    return _powers_series(x, weights)


def theta(h, k):
    """``theta_k(h)``: the ``w^k`` coefficient of ``log h``."""
    if not 1 <= k < h.p:
        raise IndexError(f"theta index must satisfy 1 <= k < p = {h.p}")
    return tmp_log(h).coeffs[k]


def normalized(h):
    """``h_0^{-1} h`` with its constant coefficient set to the identity exactly."""
    g0 = linalg.inverse(h.coeffs[0])
    rest = [linalg.matmul(g0, c) for c in h.coeffs[1:]]
    return TruncMatPoly([linalg.identity(h.r)] + rest)


def _theta_exponent(h, alpha_block):
    if len(alpha_block) == 1:
        return 0
    logs = tmp_log(normalized(h), check=False)
    acc = 0
    for i in range(1, h.p):
        if alpha_block[i]:
            acc = acc + linalg.trace(logs.coeffs[i]) * alpha_block[i]
    return acc


def _check_alpha(h, alpha_block):
    if len(alpha_block) != h.p:
        raise ValueError(f"alpha block has length {len(alpha_block)}, expected p = {h.p}")


def char_block(h, alpha_block):
    """``chi_p(h; alpha)`` over complex floats or jets (principal branch)."""
    _check_alpha(h, alpha_block)
    d0 = linalg.det(h.coeffs[0])
    if abs(d0) == 0:
        raise ZeroDivisionError("singular h_0")
    value = scalar_pow(d0, alpha_block[0])
    expo = _theta_exponent(h, alpha_block)
    if isinstance(expo, int) and expo == 0:
        return value
    return value * scalar_exp(expo)


def char_block_log(h, alpha_block):
    """Principal logarithm of :func:`char_block`: ``alpha_0 Log det h_0 + sum alpha_i Tr theta_i``."""
    _check_alpha(h, alpha_block)
    d0 = linalg.det(h.coeffs[0])
    return scalar_log(d0) * alpha_block[0] + _theta_exponent(h, alpha_block)


def _check_blocks(lam, r, blocks, alpha):
    if len(blocks) != lam.length:
        raise ValueError(f"expected {lam.length} blocks, got {len(blocks)}")
    for k, (b, n) in enumerate(zip(blocks, lam.parts)):
        if b.p != n or b.r != r:
            raise ValueError(f"block {k + 1} has shape (r={b.r}, p={b.p}), expected (r={r}, p={n})")
    if len(alpha.blocks) != lam.length:
        raise ValueError("alpha does not match the partition")


def char_lambda(lam, r, blocks, alpha):
    _check_blocks(lam, r, blocks, alpha)
    out = 1
    for h, a in zip(blocks, alpha.blocks):
        out = out * char_block(h, a)
    return out


def char_lambda_log(lam, r, blocks, alpha):
    _check_blocks(lam, r, blocks, alpha)
    out = 0
    for h, a in zip(blocks, alpha.blocks):
        out = out + char_block_log(h, a)
    return out


@dataclass
class AlphaParams:
    blocks: list

    @classmethod
    def parse(cls, text):
        """``"a0,a1;b0;c0"``: blocks separated by ``;``, entries by ``,``; numeric literals only."""
        blocks = []
        for chunk in str(text).split(";"):
            chunk = chunk.strip()
            if not chunk:
                raise ValueError("empty alpha block")
            entries = []
            for tok in chunk.split(","):
                tok = tok.strip().strip("()").replace(" ", "")
                try:
                    v = complex(tok)
                except ValueError:
                    raise ValueError(f"alpha entries must be numeric literals, got {tok!r}") from None
                entries.append(v.real if v.imag == 0 else v)
            blocks.append(tuple(entries))
        return cls(blocks)

    def shape(self):
        return tuple(len(b) for b in self.blocks)

    def shifted(self, i, j, amount=1):
        """``alpha + amount * (eps_i - eps_j)`` with 1-based block indices."""
        blocks = [list(b) for b in self.blocks]
        blocks[i - 1][0] = blocks[i - 1][0] + amount
        blocks[j - 1][0] = blocks[j - 1][0] - amount
        return AlphaParams([tuple(b) for b in blocks])

    def to_json(self):
        return [[[complex(x).real, complex(x).imag] for x in b] for b in self.blocks]

    def __str__(self):
        return ";".join(",".join(_fmt(x) for x in b) for b in self.blocks)


def _fmt(x):
    x = complex(x)
    return repr(x.real) if x.imag == 0 else repr(x)


@dataclass
class ValidationResult:
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def clauses(self):
        return sorted({v["clause"] for v in self.violations})

    def to_dict(self):
        return {"ok": self.ok, "violations": self.violations}


def validate_params(lam, m, alpha, int_tol=DEFAULT_INT_TOL, sum_tol=DEFAULT_INT_TOL):
    """Check (i) alpha_0 not an integer, (ii) top coefficient nonzero when n_j >= 2,
    (iii) the alpha_0 sum equals ``-m``; violations are returned, never raised."""
    if alpha.shape() != tuple(lam.parts):
        raise ValueError(f"alpha shape {alpha.shape()} does not match partition {tuple(lam.parts)}")
    res = ValidationResult()
    for j, (n, a) in enumerate(zip(lam.parts, alpha.blocks), start=1):
        a0 = complex(a[0])
        if abs(a0.imag) <= int_tol and abs(a0.real - round(a0.real)) <= int_tol:
            res.violations.append({"clause": "i", "block": j, "value": [a0.real, a0.imag]})
        if n >= 2 and abs(complex(a[n - 1])) <= int_tol:
            res.violations.append({"clause": "ii", "block": j})
    total = sum(complex(a[0]) for a in alpha.blocks)
    if abs(total + m) > sum_tol:
        res.violations.append({"clause": "iii", "sum": [total.real, total.imag], "expected": -m})
    return res


def _enc(x):
    if isinstance(x, (int, Fraction)):
        return str(x)
    x = complex(x)
    return [x.real, x.imag]


def _dec(x):
    if isinstance(x, str):
        f = Fraction(x)
        return f.numerator if f.denominator == 1 else f
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return complex(x[0], x[1])
    if isinstance(x, (int, float)):
        return complex(x)
    raise ValueError(f"cannot decode scalar {x!r}")


def tmp_to_json(h):
    return {"r": h.r, "p": h.p, "coeffs": [[_enc(x) for row in c for x in row] for c in h.coeffs]}


def tmp_from_json(obj):
    try:
        r, p, coeffs = int(obj["r"]), int(obj["p"]), obj["coeffs"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed TruncMatPoly JSON: {exc}") from None
    if len(coeffs) != p:
        raise ValueError(f"expected {p} coefficients, got {len(coeffs)}")
    mats = []
    for c in coeffs:
        if len(c) == r and all(isinstance(row, list) and len(row) == r and not _is_scalar(row) for row in c):
            flat = [x for row in c for x in row]
        else:
            flat = c
        if len(flat) != r * r:
            raise ValueError(f"coefficient has {len(flat)} entries, expected {r * r}")
        vals = [_dec(x) for x in flat]
        mats.append([vals[i * r : (i + 1) * r] for i in range(r)])
    return TruncMatPoly(mats)


def _is_scalar(row):
    return len(row) == 2 and all(isinstance(v, (int, float)) for v in row)


def symbolic_unipotent(r, p):
    """``1 + H_1 w + ... + H_{p-1} w^{p-1}`` with independent symbolic entries."""
    mats = [linalg.identity(r, MultiPoly.one(), MultiPoly.zero())]
    for k in range(1, p):
        mats.append([[MultiPoly.var(VarId.h(k, i, j)) for j in range(1, r + 1)] for i in range(1, r + 1)])
    return TruncMatPoly(mats)


def theta_reference(hs, k):
    """Closed noncommutative polynomials for ``theta_1 .. theta_4`` in ``h_1, h_2, ...``."""
    mm = linalg.matmul
    h1, h2 = hs[1], hs[2] if len(hs) > 2 else None
    half, third, quarter = Fraction(1, 2), Fraction(1, 3), Fraction(1, 4)
    sc = lambda c, a: linalg.scale(MultiPoly.const(c), a)  # noqa: E731
    if k == 1:
        return h1
    if k == 2:
        return linalg.sub(h2, sc(half, mm(h1, h1)))
    if k == 3:
        h3 = hs[3]
        out = linalg.sub(h3, sc(half, linalg.add(mm(h1, h2), mm(h2, h1))))
        return linalg.add(out, sc(third, mm(h1, mm(h1, h1))))
    if k == 4:
        h3, h4 = hs[3], hs[4]
        quad = linalg.add(linalg.add(mm(h1, h3), mm(h2, h2)), mm(h3, h1))
        cubic = linalg.add(linalg.add(mm(mm(h1, h1), h2), mm(mm(h1, h2), h1)), mm(mm(h2, h1), h1))
        quart = mm(mm(h1, h1), mm(h1, h1))
        out = linalg.sub(h4, sc(half, quad))
        return linalg.sub(linalg.add(out, sc(third, cubic)), sc(quarter, quart))
    raise ValueError("reference polynomials are tabulated for k <= 4")


def check_theta_expansion(r=2, kmax=4):
    """Exact comparison of ``theta_k`` from the truncated log with the tabulated polynomials."""
    holder = {}
    mismatched = []
    with timed(holder):
        h = symbolic_unipotent(r, kmax + 1)
        logs = tmp_log(h)
        for k in range(1, kmax + 1):
            if logs.coeffs[k] != theta_reference(h.coeffs, k):
                mismatched.append(k)
    rep = exact_report("theta", {"r": r, "kmax": kmax}, not mismatched, details={"mismatched": mismatched})
    rep.elapsed_ms = holder["ms"]
    return rep
