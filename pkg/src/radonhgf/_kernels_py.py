"""Pure-Python reference versions of the hot kernels.

Every function here has a compiled twin in ``_kernels.pyx`` with the same
signature and semantics; ``radonhgf.kernels`` picks one at import time.

Monomials are flat tuples ``(v1, e1, v2, e2, ...)`` with strictly increasing
variable codes and positive exponents.
"""
import numpy as np


def mono_mul(a, b):
    """Product of two flat monomials."""
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        va, vb = a[i], b[j]
        if va < vb:
            out.append(va)
            out.append(a[i + 1])
            i += 2
        elif vb < va:
            out.append(vb)
            out.append(b[j + 1])
            j += 2
        else:
            out.append(va)
            out.append(a[i + 1] + b[j + 1])
            i += 2
            j += 2
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def poly_mul(a, b):
    """Sparse product of two term maps ``{monomial: coeff}``; zero terms dropped."""
    if len(a) > len(b):
        a, b = b, a
    out = {}
    get = out.get
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = mono_mul(ma, mb)
            c = get(m, 0) + ca * cb
            if c:
                out[m] = c
            elif m in out:
                del out[m]
    return out


def poly_add_scaled(acc, b, scale):
    """In place ``acc += scale * b`` on term maps."""
    get = acc.get
    for m, c in b.items():
        v = get(m, 0) + scale * c
        if v:
            acc[m] = v
        elif m in acc:
            del acc[m]
    return acc


_SUBSET_TABLES = {}


def _subset_table(size):
    table = _SUBSET_TABLES.get(size)
    if table is None:
        masks, left, right = [], [], []
        for m in range(size):
            s = m
            while True:
                masks.append(m)
                left.append(s)
                right.append(m ^ s)
                if s == 0:
                    break
                s = (s - 1) & m
        table = (np.array(masks), np.array(left), np.array(right))
        _SUBSET_TABLES[size] = table
    return table


def jet_mul(a, b):
    """Multilinear (subset) convolution: ``c[m] = sum_{s subset m} a[s] b[m ^ s]``."""
    masks, left, right = _subset_table(len(a))
    out = np.zeros(len(a), dtype=np.result_type(a, b))
    np.add.at(out, masks, a[left] * b[right])
    return out


def grid_sum(x, w, r):
    """Tensor-product sum of ``prod_k w[i_k] * prod_{k<l} (x[i_k] - x[i_l])**2``.

    Sums over the last axis first, then over the remaining grid; the
    reduction order is fixed for a given ``(len(x), r)``.
    """
    x = np.asarray(x, dtype=float)
    w = np.asarray(w)
    n = len(x)
    if r == 1:
        return w.sum()
    # odometer over the leading r - 1 indices, vectorised over the last one
    partial = np.empty(n ** (r - 1), dtype=np.result_type(w, float))
    idx = np.zeros(r - 1, dtype=np.int64)
    for flat in range(n ** (r - 1)):
        lead_x = x[idx]
        wprod = np.prod(w[idx])
        vdm = 1.0
        for k in range(r - 1):
            for l in range(k + 1, r - 1):
                vdm *= (lead_x[k] - lead_x[l]) ** 2
        last = np.prod((x[:, None] - lead_x[None, :]) ** 2, axis=1) * w
        partial[flat] = wprod * vdm * last.sum()
        for k in range(r - 2, -1, -1):
            idx[k] += 1
            if idx[k] < n:
                break
            idx[k] = 0
    return partial.sum()
