# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernel backend: classical dense product and LU with partial
pivoting.  Same interface and factorization layout as the pure Python
backend (LAPACK getrf convention: combined L\\U matrix plus a pivot vector
with piv[k] = row swapped with row k at step k).

Singular input does not raise here: a zero pivot simply skips elimination
and the caller applies its own tolerance to the U diagonal.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "compiled"


def gemm(double[:, ::1] a, double[:, ::1] b):
    """Dense product of two float64 matrices."""
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t k = a.shape[1]
    cdef Py_ssize_t n = b.shape[1]
    if b.shape[0] != k:
        raise ValueError("inner dimensions do not match")
    out = np.zeros((m, n), dtype=np.float64)
    cdef double[:, ::1] c = out
    cdef Py_ssize_t i, l, j
    cdef double aik
    for i in range(m):
        for l in range(k):
            aik = a[i, l]
            if aik == 0.0:
                continue
            for j in range(n):
                c[i, j] += aik * b[l, j]
    return out


def lu_factor(a):
    """LU with partial pivoting; returns (lu, piv), getrf layout."""
    lu_arr = np.array(a, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] lu = lu_arr
    cdef Py_ssize_t n = lu.shape[0]
    if lu.shape[1] != n:
        raise ValueError("lu_factor requires a square matrix")
    piv_arr = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t[::1] piv = piv_arr
    cdef Py_ssize_t k, i, j, p
    cdef double best, cand, pivot, mult, tmp
    for k in range(n):
        # pick the largest magnitude pivot in column k
        p = k
        best = lu[k, k]
        if best < 0.0:
            best = -best
        for i in range(k + 1, n):
            cand = lu[i, k]
            if cand < 0.0:
                cand = -cand
            if cand > best:
                best = cand
                p = i
        piv[k] = p
        if p != k:
            for j in range(n):
                tmp = lu[k, j]
                lu[k, j] = lu[p, j]
                lu[p, j] = tmp
        pivot = lu[k, k]
        if pivot == 0.0:
            continue  # singular; caller's tolerance check reports it
        for i in range(k + 1, n):
            mult = lu[i, k] / pivot
            lu[i, k] = mult
            if mult == 0.0:
                continue
            for j in range(k + 1, n):
                lu[i, j] -= mult * lu[k, j]
    return lu_arr, piv_arr


def lu_solve(lu, piv, b):
    """Solve A x = b (b may have many columns) given lu_factor(A)."""
    cdef double[:, ::1] m = np.ascontiguousarray(lu, dtype=np.float64)
    cdef Py_ssize_t[::1] p = np.ascontiguousarray(piv, dtype=np.intp)
    x_arr = np.array(b, dtype=np.float64, order="C", copy=True)
    if x_arr.ndim == 1:
        x_arr = x_arr.reshape(-1, 1)
    cdef double[:, ::1] x = x_arr
    cdef Py_ssize_t n = m.shape[0]
    cdef Py_ssize_t nrhs = x.shape[1]
    if x.shape[0] != n:
        raise ValueError("right-hand side has wrong number of rows")
    cdef Py_ssize_t k, i, j
    cdef double tmp, s
    # apply the recorded row interchanges
    for k in range(n):
        i = p[k]
        if i != k:
            for j in range(nrhs):
                tmp = x[k, j]
                x[k, j] = x[i, j]
                x[i, j] = tmp
    # forward substitution, unit lower triangle
    for k in range(1, n):
        for i in range(k):
            s = m[k, i]
            if s == 0.0:
                continue
            for j in range(nrhs):
                x[k, j] -= s * x[i, j]
    # back substitution
    for k in range(n - 1, -1, -1):
        for i in range(k + 1, n):
            s = m[k, i]
            if s == 0.0:
                continue
            for j in range(nrhs):
                x[k, j] -= s * x[i, j]
        s = m[k, k]
        for j in range(nrhs):
            x[k, j] /= s
    return x_arr
