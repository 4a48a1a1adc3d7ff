# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: Gaussian Gram matrices, incremental purity and
dense symmetric eigensolvers (cyclic Jacobi; Householder + implicit QL).

Mirrors ``histent._pycore`` function for function. Heavy loops run
without the GIL so independent matrices can be decomposed from threads.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, fabs, sqrt, hypot, copysign
from libc.stdlib cimport malloc, free

from .errors import ConvergenceError

cnp.import_array()

NAME = "cython"

cdef double EPS = 2.220446049250313e-16
cdef double UNDERFLOW = 1e-300
cdef int MAX_SWEEPS = 100
cdef int MAX_QL_ITER = 60


def overlap_matrix(alphas):
    cdef const double[::1] a = np.ascontiguousarray(alphas, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0], i, j
    out_arr = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double nd = <double>n, d, v
    with nogil:
        for i in range(n):
            out[i, i] = 1.0 / nd
            for j in range(i):
                d = a[i] - a[j]
                v = exp(-0.5 * d * d)
                if v < UNDERFLOW:
                    v = 0.0
                v = v / nd
                out[i, j] = v
                out[j, i] = v
    return out_arr


def purity(alphas):
    cdef const double[::1] a = np.ascontiguousarray(alphas, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0], i, j
    cdef double total = 0.0, d, v
    with nogil:
        for i in range(n):
            for j in range(i):
                d = a[i] - a[j]
                v = exp(-d * d)
                if v >= UNDERFLOW:
                    total += v
        total = n + 2.0 * total
    return total / (<double>n * <double>n)


def prefix_purity(alphas):
    cdef const double[::1] a = np.ascontiguousarray(alphas, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0], k, j
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double total = 0.0, s, d, v
    with nogil:
        for k in range(n):
            s = 0.0
            for j in range(k):
                d = a[j] - a[k]
                v = exp(-d * d)
                if v >= UNDERFLOW:
                    s += v
            total += 1.0 + 2.0 * s
            out[k] = total / (<double>(k + 1) * <double>(k + 1))
    return out_arr


cdef int _jacobi(double[:, ::1] a, double[:, ::1] v, bint vectors) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0], p, q, r
    cdef int sweep
    cdef bint rotated
    cdef double apq, app, aqq, theta, t, c, s, x, y
    for sweep in range(MAX_SWEEPS):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                if fabs(apq) <= EPS * sqrt(fabs(app * aqq)) or fabs(apq) < 1e-300:
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                rotated = True
                theta = (aqq - app) / (2.0 * apq)
                t = copysign(1.0, theta) / (fabs(theta) + hypot(theta, 1.0))
                c = 1.0 / hypot(t, 1.0)
                s = t * c
                for r in range(n):
                    x = a[r, p]
                    y = a[r, q]
                    a[r, p] = c * x - s * y
                    a[r, q] = s * x + c * y
                for r in range(n):
                    x = a[p, r]
                    y = a[q, r]
                    a[p, r] = c * x - s * y
                    a[q, r] = s * x + c * y
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                if vectors:
                    for r in range(n):
                        x = v[r, p]
                        y = v[r, q]
                        v[r, p] = c * x - s * y
                        v[r, q] = s * x + c * y
        if not rotated:
            return 0
    return 1


def jacobi_eigh(matrix, vectors=True):
    a_arr = np.array(matrix, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n = a_arr.shape[0]
    cdef double[:, ::1] a = a_arr
    v_arr = np.eye(n) if vectors else np.zeros((1, 1))
    cdef double[:, ::1] v = v_arr
    cdef bint want = bool(vectors)
    cdef int status
    with nogil:
        status = _jacobi(a, v, want)
    if status:
        raise ConvergenceError("Jacobi sweeps did not converge")
    return np.diag(a_arr).copy(), (v_arr if vectors else None)


cdef void _householder(double[:, ::1] a, double[::1] d, double[::1] e,
                       double[::1] hs, double* p, double* q, double* u) noexcept nogil:
    # Lower triangle of a is read and updated; u_k is stored in column k
    # below the diagonal, its scale h_k in hs[k] (0 when skipped).
    # Work vectors p, q, u are contiguous copies; column access is strided.
    cdef Py_ssize_t n = a.shape[0], k, i, j
    cdef double norm, alpha, h, kk, ui, qi, s, s0, s1, s2, s3
    cdef double* row
    for k in range(n - 2):
        norm = 0.0
        for i in range(k + 1, n):
            u[i] = a[i, k]
            norm += u[i] * u[i]
        norm = sqrt(norm)
        hs[k] = 0.0
        if norm == 0.0:
            e[k] = 0.0
            continue
        alpha = -copysign(norm, u[k + 1])
        u[k + 1] -= alpha
        h = 0.0
        for i in range(k + 1, n):
            h += u[i] * u[i]
        h *= 0.5
        if h == 0.0:
            e[k] = a[k + 1, k]
            continue
        a[k + 1, k] = u[k + 1]
        hs[k] = h
        e[k] = alpha
        # p = A22 u / h using the lower triangle
        for i in range(k + 1, n):
            p[i] = 0.0
        for i in range(k + 1, n):
            row = &a[i, 0]
            ui = u[i]
            s = 0.0
            # four partial sums let the compiler vectorize without -ffast-math
            s0 = 0.0
            s1 = 0.0
            s2 = 0.0
            s3 = 0.0
            j = k + 1
            while j + 3 < i:
                s0 += row[j] * u[j]
                s1 += row[j + 1] * u[j + 1]
                s2 += row[j + 2] * u[j + 2]
                s3 += row[j + 3] * u[j + 3]
                p[j] += row[j] * ui
                p[j + 1] += row[j + 1] * ui
                p[j + 2] += row[j + 2] * ui
                p[j + 3] += row[j + 3] * ui
                j += 4
            while j < i:
                s0 += row[j] * u[j]
                p[j] += row[j] * ui
                j += 1
            s = (s0 + s1) + (s2 + s3)
            p[i] += s + row[i] * ui
        kk = 0.0
        for i in range(k + 1, n):
            p[i] /= h
            kk += u[i] * p[i]
        kk /= 2.0 * h
        for i in range(k + 1, n):
            q[i] = p[i] - kk * u[i]
        for i in range(k + 1, n):
            row = &a[i, 0]
            qi = q[i]
            ui = u[i]
            for j in range(k + 1, i + 1):
                row[j] -= qi * u[j] + ui * q[j]
    for k in range(n):
        d[k] = a[k, k]
    if n >= 2:
        e[n - 2] = a[n - 1, n - 2]
    e[n - 1] = 0.0


cdef void _accumulate(double[:, ::1] a, double[::1] hs, double[:, ::1] z,
                      double* w) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0], k, i, j
    cdef double h, ui
    for i in range(n):
        for j in range(n):
            z[i, j] = 1.0 if i == j else 0.0
    k = n - 3
    while k >= 0:
        h = hs[k]
        if h != 0.0:
            # w = u^T Z22
            for j in range(k + 1, n):
                w[j] = 0.0
            for i in range(k + 1, n):
                ui = a[i, k]
                for j in range(k + 1, n):
                    w[j] += ui * z[i, j]
            for i in range(k + 1, n):
                ui = a[i, k] / h
                for j in range(k + 1, n):
                    z[i, j] -= ui * w[j]
        k -= 1


cdef int _ql(double[::1] d, double[::1] e, double[:, ::1] z, bint vectors) noexcept nogil:
    cdef Py_ssize_t n = d.shape[0], l, m, i, r
    cdef int it
    cdef double dd, g, rr, s, c, p, f, b, x, y
    cdef bint deflated
    cdef double tnorm = 0.0
    for l in range(n):
        x = fabs(d[l]) + fabs(e[l])
        if x > tnorm:
            tnorm = x
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = fabs(d[m]) + fabs(d[m + 1])
                if fabs(e[m]) <= EPS * dd or fabs(e[m]) <= EPS * tnorm:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > MAX_QL_ITER:
                return 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            rr = hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + copysign(rr, g))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                rr = hypot(f, g)
                e[i + 1] = rr
                if rr == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / rr
                c = g / rr
                g = d[i + 1] - p
                rr = (d[i] - g) * s + 2.0 * c * b
                p = s * rr
                d[i + 1] = g + p
                g = c * rr - b
                if vectors:
                    for r in range(n):
                        x = z[r, i]
                        y = z[r, i + 1]
                        z[r, i] = c * x - s * y
                        z[r, i + 1] = s * x + c * y
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


def tridiag_ql_eigh(matrix, vectors=True):
    a_arr = np.array(matrix, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n = a_arr.shape[0]
    cdef double[:, ::1] a = a_arr
    d_arr = np.zeros(n)
    e_arr = np.zeros(n)
    hs_arr = np.zeros(max(n, 1))
    cdef double[::1] d = d_arr
    cdef double[::1] e = e_arr
    cdef double[::1] hs = hs_arr
    z_arr = np.zeros((n, n)) if vectors else np.zeros((1, 1))
    cdef double[:, ::1] z = z_arr
    cdef bint want = bool(vectors)
    cdef int status
    cdef double* p = <double*> malloc(3 * (n + 1) * sizeof(double))
    if p == NULL:
        raise MemoryError()
    cdef double* q = p + (n + 1)
    cdef double* u = q + (n + 1)
    try:
        with nogil:
            _householder(a, d, e, hs, p, q, u)
            if want:
                _accumulate(a, hs, z, p)
            status = _ql(d, e, z, want)
    finally:
        free(p)
    if status:
        raise ConvergenceError("implicit QL did not converge")
    return d_arr, (z_arr if vectors else None)
