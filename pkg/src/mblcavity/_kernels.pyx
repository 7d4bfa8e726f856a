# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: Jacobi sweeps, tridiagonal bisection, S11 product.

Same contracts as ``mblcavity._fallback``.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()

cdef double EPS = np.finfo(float).eps
cdef double DTINY = np.finfo(float).tiny


cdef double _off_norm(double[:, ::1] a, Py_ssize_t n) nogil:
    cdef double s = 0.0
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(n):
            if i != j:
                s += a[i, j] * a[i, j]
    return sqrt(s)


def jacobi_eigh(a_in, double tol, int max_sweeps):
    cdef cnp.ndarray[double, ndim=2, mode="c"] a_arr = np.array(a_in, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n = a_arr.shape[0]
    cdef cnp.ndarray[double, ndim=2, mode="c"] v_arr = np.eye(n)
    cdef double[:, ::1] a = a_arr
    cdef double[:, ::1] v = v_arr
    cdef Py_ssize_t p, q, k
    cdef double apq, app, aqq, theta, t, c, s, g, x, y, off
    cdef int sweeps = 0
    with nogil:
        off = _off_norm(a, n)
        while off > tol and sweeps < max_sweeps:
            sweeps += 1
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    if apq == 0.0:
                        continue
                    app = a[p, p]
                    aqq = a[q, q]
                    g = 100.0 * fabs(apq)
                    if sweeps > 4 and fabs(app) + g == fabs(app) and fabs(aqq) + g == fabs(aqq):
                        a[p, q] = 0.0
                        a[q, p] = 0.0
                        continue
                    theta = (aqq - app) / (2.0 * apq)
                    t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                    c = 1.0 / sqrt(t * t + 1.0)
                    s = t * c
                    for k in range(n):
                        x = a[k, p]
                        y = a[k, q]
                        a[k, p] = c * x - s * y
                        a[k, q] = s * x + c * y
                    for k in range(n):
                        x = a[p, k]
                        y = a[q, k]
                        a[p, k] = c * x - s * y
                        a[q, k] = s * x + c * y
                    a[p, p] = app - t * apq
                    a[q, q] = aqq + t * apq
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    for k in range(n):
                        x = v[k, p]
                        y = v[k, q]
                        v[k, p] = c * x - s * y
                        v[k, q] = s * x + c * y
            off = _off_norm(a, n)
    return np.diag(a_arr).copy(), v_arr, sweeps, off, off <= tol


cdef Py_ssize_t _sturm_count(double[::1] diag, double[::1] off2, double sigma,
                             double pivmin, Py_ssize_t n) nogil:
    cdef Py_ssize_t count = 0, i
    cdef double d = diag[0] - sigma
    if fabs(d) < pivmin:
        d = -pivmin
    if d < 0.0:
        count += 1
    for i in range(1, n):
        d = diag[i] - sigma - off2[i - 1] / d
        if fabs(d) < pivmin:
            d = -pivmin
        if d < 0.0:
            count += 1
    return count


cdef void _gt_factor(double[::1] dl, double[::1] d, double[::1] du, double[::1] du2,
                     char[::1] swap, Py_ssize_t n) nogil:
    cdef Py_ssize_t i
    cdef double fact, temp
    for i in range(n - 1):
        if fabs(d[i]) >= fabs(dl[i]):
            if d[i] != 0.0:
                fact = dl[i] / d[i]
                dl[i] = fact
                d[i + 1] -= fact * du[i]
            swap[i] = 0
        else:
            fact = d[i] / dl[i]
            d[i] = dl[i]
            dl[i] = fact
            temp = du[i]
            du[i] = d[i + 1]
            d[i + 1] = temp - fact * d[i + 1]
            if i < n - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -fact * du[i + 1]
            swap[i] = 1


cdef void _gt_solve(double[::1] dl, double[::1] d, double[::1] du, double[::1] du2,
                    char[::1] swap, double[::1] b, double tiny, Py_ssize_t n) nogil:
    cdef Py_ssize_t i
    cdef double temp, piv
    for i in range(n - 1):
        if swap[i] == 0:
            b[i + 1] -= dl[i] * b[i]
        else:
            temp = b[i]
            b[i] = b[i + 1]
            b[i + 1] = temp - dl[i] * b[i]
    piv = d[n - 1]
    if fabs(piv) < tiny:
        piv = tiny
    b[n - 1] /= piv
    if n > 1:
        piv = d[n - 2]
        if fabs(piv) < tiny:
            piv = tiny
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / piv
    i = n - 3
    while i >= 0:
        piv = d[i]
        if fabs(piv) < tiny:
            piv = tiny
        b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / piv
        i -= 1


def tridiag_lowest(diag_in, off_in, int n_levels):
    cdef double[::1] diag = np.ascontiguousarray(diag_in, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] off_arr = np.ascontiguousarray(off_in, dtype=np.float64)
    cdef double[::1] off = off_arr
    cdef Py_ssize_t n = diag.shape[0]
    cdef cnp.ndarray[double, ndim=1] off2_arr = off_arr * off_arr
    cdef double[::1] off2 = off2_arr
    cdef Py_ssize_t i, level, prev, it
    cdef double lo0 = 1e300, hi0 = -1e300, r, tnorm, pivmin, atol, a, b, mid, lo, lam, shift, dot, nrm

    for i in range(n):
        r = 0.0
        if i > 0:
            r += fabs(off[i - 1])
        if i < n - 1:
            r += fabs(off[i])
        if diag[i] - r < lo0:
            lo0 = diag[i] - r
        if diag[i] + r > hi0:
            hi0 = diag[i] + r
    tnorm = max(fabs(lo0), fabs(hi0), 1.0)
    pivmin = max(float(np.max(off2_arr)) if n > 1 else 0.0, 1.0) * DTINY * 1e4
    atol = 2.0 * EPS * tnorm

    cdef cnp.ndarray[double, ndim=1] values = np.empty(n_levels)
    lo = lo0
    with nogil:
        for level in range(n_levels):
            a = lo
            b = hi0
            while b - a > atol + 2.0 * EPS * max(fabs(a), fabs(b)):
                mid = 0.5 * (a + b)
                if _sturm_count(diag, off2, mid, pivmin, n) > level:
                    b = mid
                else:
                    a = mid
            values[level] = 0.5 * (a + b)
            lo = a

    cdef cnp.ndarray[double, ndim=2, mode="c"] vec_arr = np.empty((n_levels, n))
    cdef double[:, ::1] vecs = vec_arr
    cdef double[::1] start = np.cos(np.arange(n) * 0.7071) + 1.1
    cdef double[::1] dl = np.empty(max(n - 1, 1))
    cdef double[::1] du = np.empty(max(n - 1, 1))
    cdef double[::1] d = np.empty(n)
    cdef double[::1] du2 = np.zeros(max(n - 2, 1))
    cdef char[::1] swap = np.zeros(max(n - 1, 1), dtype=np.int8)
    cdef double[::1] x = np.empty(n)
    cdef Py_ssize_t imax
    with nogil:
        for level in range(n_levels):
            lam = values[level]
            shift = lam + 10.0 * EPS * tnorm
            for i in range(n - 1):
                dl[i] = off[i]
                du[i] = off[i]
            for i in range(n):
                d[i] = diag[i] - shift
            for i in range(n - 2):
                du2[i] = 0.0
            _gt_factor(dl, d, du, du2, swap, n)
            nrm = 0.0
            for i in range(n):
                nrm += start[i] * start[i]
            nrm = sqrt(nrm)
            for i in range(n):
                x[i] = start[i] / nrm
            for it in range(4):
                _gt_solve(dl, d, du, du2, swap, x, EPS * tnorm, n)
                for prev in range(level):
                    dot = 0.0
                    for i in range(n):
                        dot += vecs[prev, i] * x[i]
                    for i in range(n):
                        x[i] -= dot * vecs[prev, i]
                nrm = 0.0
                for i in range(n):
                    nrm += x[i] * x[i]
                nrm = sqrt(nrm)
                for i in range(n):
                    x[i] /= nrm
            imax = 0
            for i in range(n):
                if fabs(x[i]) > fabs(x[imax]):
                    imax = i
            if x[imax] < 0.0:
                for i in range(n):
                    x[i] = -x[i]
            for i in range(n):
                vecs[level, i] = x[i]
    return values, vec_arr.T.copy()


def s11_product(f_in, f_res_in, inv_qint_in, inv_qext_in):
    cdef double[::1] f = np.ascontiguousarray(f_in, dtype=np.float64)
    cdef double[::1] fr = np.ascontiguousarray(f_res_in, dtype=np.float64)
    cdef double[::1] gi = np.ascontiguousarray(inv_qint_in, dtype=np.float64)
    cdef double[::1] ge = np.ascontiguousarray(inv_qext_in, dtype=np.float64)
    cdef Py_ssize_t n = f.shape[0], m = fr.shape[0], i, r
    cdef cnp.ndarray[double complex, ndim=1] out_arr = np.ones(n, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef double complex acc, num, den
    cdef double delta
    with nogil:
        for i in range(n):
            acc = 1.0
            for r in range(m):
                delta = (f[i] - fr[r]) / fr[r]
                num = (gi[r] - ge[r]) + 2.0j * delta
                den = (gi[r] + ge[r]) + 2.0j * delta
                acc = acc * (num / den)
            out[i] = acc
    return out_arr


def secular_bisect(double corner, d_in, z2_in, origin_in, lo_in, hi_in, int max_iter):
    cdef double[::1] d = np.ascontiguousarray(d_in, dtype=np.float64)
    cdef double[::1] z2 = np.ascontiguousarray(z2_in, dtype=np.float64)
    cdef long[::1] origin = np.ascontiguousarray(origin_in, dtype=np.int64)
    cdef cnp.ndarray[double, ndim=1] lo_arr = np.array(lo_in, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] hi_arr = np.array(hi_in, dtype=np.float64)
    cdef double[::1] lo = lo_arr
    cdef double[::1] hi = hi_arr
    cdef Py_ssize_t m = d.shape[0], n_roots = lo.shape[0], i, k, it
    cdef double mu, fval, base, tol
    with nogil:
        for i in range(n_roots):
            base = d[origin[i]]
            for it in range(max_iter):
                tol = 4.0 * EPS * max(fabs(lo[i]), fabs(hi[i])) + 1e-300
                if hi[i] - lo[i] <= tol:
                    break
                mu = 0.5 * (lo[i] + hi[i])
                fval = corner - (base + mu)
                for k in range(m):
                    fval -= z2[k] / ((d[k] - base) - mu)
                if fval > 0.0:
                    lo[i] = mu
                else:
                    hi[i] = mu
    return 0.5 * (lo_arr + hi_arr)
