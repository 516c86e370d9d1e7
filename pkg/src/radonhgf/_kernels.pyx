# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_kernels_py``; same semantics."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


cpdef tuple mono_mul(tuple a, tuple b):
    cdef Py_ssize_t i = 0, j = 0, na = len(a), nb = len(b)
    cdef long va, vb
    if na == 0:
        return b
    if nb == 0:
        return a
    cdef list out = []
    while i < na and j < nb:
        va = a[i]
        vb = b[j]
        if va < vb:
            out.append(a[i])
            out.append(a[i + 1])
            i += 2
        elif vb < va:
            out.append(b[j])
            out.append(b[j + 1])
            j += 2
        else:
            out.append(a[i])
            out.append(<long>a[i + 1] + <long>b[j + 1])
            i += 2
            j += 2
    while i < na:
        out.append(a[i])
        i += 1
    while j < nb:
        out.append(b[j])
        j += 1
    return tuple(out)


cpdef dict poly_mul(dict a, dict b):
    cdef dict out = {}
    cdef tuple m
    if len(a) > len(b):
        a, b = b, a
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = mono_mul(<tuple>ma, <tuple>mb)
            c = out.get(m, 0) + ca * cb
            if c:
                out[m] = c
            elif m in out:
                del out[m]
    return out


cpdef dict poly_add_scaled(dict acc, dict b, scale):
    for m, c in b.items():
        v = acc.get(m, 0) + scale * c
        if v:
            acc[m] = v
        elif m in acc:
            del acc[m]
    return acc


def jet_mul(a, b):
    if a.dtype != np.complex128 or b.dtype != np.complex128:
        from radonhgf._kernels_py import jet_mul as _py_jet_mul
        return _py_jet_mul(a, b)
    return _jet_mul_c(a, b)


cdef _jet_mul_c(cnp.complex128_t[::1] a, cnp.complex128_t[::1] b):
    cdef Py_ssize_t size = a.shape[0]
    cdef Py_ssize_t m, s
    out = np.zeros(size, dtype=np.complex128)
    cdef cnp.complex128_t[::1] c = out
    cdef double complex acc
    for m in range(size):
        acc = 0
        s = m
        while True:
            acc = acc + a[s] * b[m ^ s]
            if s == 0:
                break
            s = (s - 1) & m
        c[m] = acc
    return out


def grid_sum(x, w, r):
    x = np.ascontiguousarray(x, dtype=np.float64)
    w = np.asarray(w)
    if np.iscomplexobj(w):
        from radonhgf._kernels_py import grid_sum as _py_grid_sum
        return _py_grid_sum(x, w, r)
    return _grid_sum_c(x, np.ascontiguousarray(w, dtype=np.float64), r)


cdef double _pairwise(double[::1] v, Py_ssize_t lo, Py_ssize_t hi):
    cdef Py_ssize_t k
    cdef double s
    if hi - lo <= 8:
        s = 0.0
        for k in range(lo, hi):
            s += v[k]
        return s
    k = lo + (hi - lo) // 2
    return _pairwise(v, lo, k) + _pairwise(v, k, hi)


cdef double _grid_sum_c(double[::1] x, double[::1] w, int r):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t nlead = 1
    cdef Py_ssize_t flat, q
    cdef int k, l
    cdef double wprod, vdm, inner, term, d
    cdef Py_ssize_t idx[16]
    if r == 1:
        return _pairwise(w, 0, n)
    for k in range(r - 1):
        nlead *= n
        idx[k] = 0
    partial = np.empty(nlead, dtype=np.float64)
    cdef double[::1] part = partial
    for flat in range(nlead):
        wprod = 1.0
        vdm = 1.0
        for k in range(r - 1):
            wprod *= w[idx[k]]
            for l in range(k + 1, r - 1):
                d = x[idx[k]] - x[idx[l]]
                vdm *= d * d
        inner = 0.0
        for q in range(n):
            term = w[q]
            for k in range(r - 1):
                d = x[q] - x[idx[k]]
                term *= d * d
            inner += term
        part[flat] = wprod * vdm * inner
        for k in range(r - 2, -1, -1):
            idx[k] += 1
            if idx[k] < n:
                break
            idx[k] = 0
    return _pairwise(part, 0, nlead)
