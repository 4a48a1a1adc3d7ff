"""Pure-Python/numpy kernels.

Same signatures as the compiled ``_core`` extension. Used when the
extension is not built or when ``HISTENT_PURE_PYTHON=1`` is set.
Eigenvalues are returned unsorted; callers sort.
"""
import math

import numpy as np

from .errors import ConvergenceError

NAME = "python"

EPS = np.finfo(np.float64).eps
UNDERFLOW = 1e-300
MAX_SWEEPS = 100
MAX_QL_ITER = 60


def overlap_matrix(alphas):
    """Normalized Gram matrix ``exp(-(a_n - a_m)**2 / 2) / N``."""
    a = np.ascontiguousarray(alphas, dtype=np.float64)
    n = a.shape[0]
    diff = a[:, None] - a[None, :]
    out = np.exp(-0.5 * diff * diff)
    out[out < UNDERFLOW] = 0.0
    np.fill_diagonal(out, 1.0)
    out /= n
    return out


def purity(alphas):
    """Tr O**2 evaluated directly from squared overlaps, O(N^2)."""
    a = np.ascontiguousarray(alphas, dtype=np.float64)
    n = a.shape[0]
    diff = a[:, None] - a[None, :]
    sq = np.exp(-diff * diff)
    sq[sq < UNDERFLOW] = 0.0
    np.fill_diagonal(sq, 1.0)
    return float(sq.sum()) / (n * n)


def prefix_purity(alphas):
    """Purity of every prefix via the running sum T_{N+1} = T_N + 1 + 2 sum ov^2."""
    a = np.ascontiguousarray(alphas, dtype=np.float64)
    n = a.shape[0]
    out = np.empty(n)
    total = 0.0
    for k in range(n):
        if k:
            d = a[:k] - a[k]
            sq = np.exp(-d * d)
            sq[sq < UNDERFLOW] = 0.0
            total += 1.0 + 2.0 * float(sq.sum())
        else:
            total = 1.0
        out[k] = total / float((k + 1) * (k + 1))
    return out


def jacobi_eigh(matrix, vectors=True):
    """Cyclic Jacobi eigensolver for a real symmetric matrix."""
    a = np.array(matrix, dtype=np.float64, copy=True)
    n = a.shape[0]
    v = np.eye(n) if vectors else None
    for _ in range(MAX_SWEEPS):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                # relative-accuracy threshold; keeps tiny eigenvalues accurate
                if abs(apq) <= EPS * math.sqrt(abs(app * aqq)) or abs(apq) < 1e-300:
                    a[p, q] = a[q, p] = 0.0
                    continue
                rotated = True
                theta = (aqq - app) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                if vectors:
                    vp = v[:, p].copy()
                    vq = v[:, q].copy()
                    v[:, p] = c * vp - s * vq
                    v[:, q] = s * vp + c * vq
        if not rotated:
            return np.diag(a).copy(), v
    raise ConvergenceError("Jacobi sweeps did not converge")


def _householder(a, vectors):
    """Reduce symmetric ``a`` (overwritten) to tridiagonal form.

    Returns diagonal, subdiagonal (length n, last entry 0) and the
    orthogonal accumulation matrix (or None).
    """
    n = a.shape[0]
    d = np.zeros(n)
    e = np.zeros(n)
    us = []
    for k in range(n - 2):
        x = a[k + 1:, k].copy()
        norm = math.sqrt(float(x @ x))
        if norm == 0.0:
            e[k] = 0.0
            us.append(None)
            continue
        alpha = -math.copysign(norm, x[0])
        u = x
        u[0] -= alpha
        h = 0.5 * float(u @ u)
        if h == 0.0:
            e[k] = x[0]
            us.append(None)
            continue
        sub = a[k + 1:, k + 1:]
        p = (sub @ u) / h
        kk = float(u @ p) / (2.0 * h)
        q = p - kk * u
        sub -= np.outer(q, u) + np.outer(u, q)
        e[k] = alpha
        us.append((u, h))
    for k in range(n):
        d[k] = a[k, k]
    if n >= 2:
        e[n - 2] = a[n - 1, n - 2]
    e[n - 1] = 0.0
    z = None
    if vectors:
        z = np.eye(n)
        for k in range(len(us) - 1, -1, -1):
            if us[k] is None:
                continue
            u, h = us[k]
            blk = z[k + 1:, k + 1:]
            blk -= np.outer(u / h, u @ blk)
    return d, e, z


def _ql_implicit(d, e, z):
    """Implicit-shift QL on a symmetric tridiagonal matrix, in place."""
    n = d.shape[0]
    # absolute deflation floor: eps * ||T||; stops stalls on near-null clusters
    tnorm = float(np.max(np.abs(d) + np.abs(e))) if n else 0.0
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= EPS * dd or abs(e[m]) <= EPS * tnorm:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > MAX_QL_ITER:
                raise ConvergenceError("implicit QL did not converge")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if z is not None:
                    zi = z[:, i].copy()
                    zi1 = z[:, i + 1]
                    z[:, i] = c * zi - s * zi1
                    z[:, i + 1] = s * zi + c * zi1
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0


def tridiag_ql_eigh(matrix, vectors=True):
    """Householder tridiagonalization followed by implicit QL."""
    a = np.array(matrix, dtype=np.float64, copy=True)
    d, e, z = _householder(a, vectors)
    _ql_implicit(d, e, z)
    return d, z
