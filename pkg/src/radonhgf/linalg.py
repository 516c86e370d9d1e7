"""Small dense matrix routines over a generic scalar ring.

Matrices are lists of rows. The same code serves exact rationals,
complex floats, :class:`~radonhgf.jets.Jet` values and (where no division
is needed) :class:`~radonhgf.algebra.MultiPoly` entries.
"""
from fractions import Fraction
from itertools import permutations

from radonhgf.algebra import MultiPoly


def shape(a):
    return len(a), len(a[0]) if a else 0


def identity(n, one=1, zero=0):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def zeros(n, k, zero=0):
    return [[zero] * k for _ in range(n)]


def add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def neg(a):
    return [[-x for x in row] for row in a]


def scale(c, a):
    return [[x * c for x in row] for row in a]


def matmul(a, b):
    n, k = shape(a)
    k2, p = shape(b)
    if k != k2:
        raise ValueError(f"shape mismatch {n}x{k} @ {k2}x{p}")
    out = []
    for i in range(n):
        row = []
        ai = a[i]
        for j in range(p):
            acc = ai[0] * b[0][j]
            for t in range(1, k):
                acc = acc + ai[t] * b[t][j]
            row.append(acc)
        out.append(row)
    return out


def transpose(a):
    return [list(col) for col in zip(*a)]


def trace(a):
    acc = a[0][0]
    for i in range(1, len(a)):
        acc = acc + a[i][i]
    return acc


def hstack(*mats):
    return [sum((list(m[i]) for m in mats), []) for i in range(len(mats[0]))]


def vsplit(a, k):
    """Split rows into ``a[:k]`` and ``a[k:]``."""
    return [list(r) for r in a[:k]], [list(r) for r in a[k:]]


def columns(a, lo, hi):
    return [list(row[lo:hi]) for row in a]


def block_diag(*mats):
    n = sum(len(m) for m in mats)
    out = zeros(n, n)
    off = 0
    for m in mats:
        for i, row in enumerate(m):
            for j, x in enumerate(row):
                out[off + i][off + j] = x
        off += len(m)
    return out


def _mag(x):
    return abs(x)


def _is_exact(x):
    return isinstance(x, (int, Fraction))


def _div(a, b):
    if _is_exact(a) and _is_exact(b):
        q = Fraction(a) / b
        return q.numerator if q.denominator == 1 else q
    return a / b


def inverse(a):
    """Gauss-Jordan inverse with largest-magnitude pivoting."""
    n = len(a)
    work = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: _mag(work[r][col]))
        if _mag(work[piv][col]) == 0:
            raise ZeroDivisionError("singular matrix")
        work[col], work[piv] = work[piv], work[col]
        p = work[col][col]
        work[col] = [_div(x, p) for x in work[col]]
        for r in range(n):
            if r != col:
                f = work[r][col]
                if _is_exact(f) and f == 0:
                    continue
                work[r] = [x - f * y for x, y in zip(work[r], work[col])]
    return [row[n:] for row in work]


def _sign(perm):
    inv = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])
    return -1 if inv % 2 else 1


def det_leibniz(a):
    n = len(a)
    total = None
    for sigma in permutations(range(n)):
        term = _sign(sigma)
        for row, col in enumerate(sigma):
            term = term * a[row][col]
        total = term if total is None else total + term
    return total


def det(a):
    """Determinant: Leibniz for polynomial entries, elimination otherwise."""
    n = len(a)
    if n == 0:
        return 1
    if any(isinstance(x, MultiPoly) for row in a for x in row) or n <= 2:
        return det_leibniz(a)
    work = [list(row) for row in a]
    sign = 1
    acc = 1
    for col in range(n):
        piv = max(range(col, n), key=lambda r: _mag(work[r][col]))
        if _mag(work[piv][col]) == 0:
            return 0 * work[0][0]
        if piv != col:
            work[col], work[piv] = work[piv], work[col]
            sign = -sign
        p = work[col][col]
        acc = acc * p
        for r in range(col + 1, n):
            f = _div(work[r][col], p)
            work[r] = work[r][:col] + [x - f * y for x, y in zip(work[r][col:], work[col][col:])]
    return acc * sign


def to_complex(a):
    return [[complex(x) for x in row] for row in a]


def max_abs_diff(a, b):
    return max(abs(x - y) for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def max_abs(a):
    return max(abs(x) for row in a for x in row)
