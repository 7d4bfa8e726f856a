"""Pure numpy implementations of the hot kernels.

Signatures and results match the compiled ``_kernels`` module; this one is
selected when the extension is unavailable or ``MBLCAVITY_PURE_PYTHON`` is set.
"""

import numpy as np

_EPS = np.finfo(float).eps


def jacobi_eigh(a, tol, max_sweeps):
    """Cyclic Jacobi diagonalization of a real symmetric matrix.

    :param a: (n, n) float64 array; not modified.
    :param tol: stop once the off-diagonal Frobenius norm is <= tol.
    :param max_sweeps: sweep cap.
    :return: (diagonal, vectors, sweeps, off_norm, converged); eigenvalues unsorted.
    """
    a = np.array(a, dtype=np.float64, order="C", copy=True)
    n = a.shape[0]
    v = np.eye(n)
    off = _off_norm(a)
    sweeps = 0
    while off > tol and sweeps < max_sweeps:
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                g = 100.0 * abs(apq)
                if sweeps > 4 and abs(app) + g == abs(app) and abs(aqq) + g == abs(aqq):
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (aqq - app) / (2.0 * apq)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = c * colp - s * colq
                a[:, q] = s * colp + c * colq
                rowp = a[p, :].copy()
                rowq = a[q, :].copy()
                a[p, :] = c * rowp - s * rowq
                a[q, :] = s * rowp + c * rowq
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        off = _off_norm(a)
    return np.diag(a).copy(), v, sweeps, off, off <= tol


def _off_norm(a):
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off * off)))


def _sturm_count(diag, off2, sigma, pivmin):
    # number of eigenvalues strictly below sigma
    count = 0
    d = diag[0] - sigma
    if abs(d) < pivmin:
        d = -pivmin
    if d < 0.0:
        count += 1
    for i in range(1, diag.shape[0]):
        d = diag[i] - sigma - off2[i - 1] / d
        if abs(d) < pivmin:
            d = -pivmin
        if d < 0.0:
            count += 1
    return count


def _gt_factor(dl, d, du):
    n = d.shape[0]
    du2 = np.zeros(max(n - 2, 0))
    swap = np.zeros(max(n - 1, 0), dtype=bool)
    for i in range(n - 1):
        if abs(d[i]) >= abs(dl[i]):
            if d[i] != 0.0:
                fact = dl[i] / d[i]
                dl[i] = fact
                d[i + 1] -= fact * du[i]
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
            swap[i] = True
    return dl, d, du, du2, swap


def _gt_solve(dl, d, du, du2, swap, b, tiny):
    n = d.shape[0]
    b = b.copy()
    for i in range(n - 1):
        if not swap[i]:
            b[i + 1] -= dl[i] * b[i]
        else:
            temp = b[i]
            b[i] = b[i + 1]
            b[i + 1] = temp - dl[i] * b[i]
    piv = d.copy()
    piv[np.abs(piv) < tiny] = tiny
    b[n - 1] /= piv[n - 1]
    if n > 1:
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / piv[n - 2]
    for i in range(n - 3, -1, -1):
        b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / piv[i]
    return b


def tridiag_lowest(diag, off, n_levels):
    """Lowest eigenpairs of a symmetric tridiagonal matrix.

    Bisection on Sturm counts for the values, inverse iteration with a pivoted
    tridiagonal LU for the vectors.

    :return: (values ascending, vectors as columns of an (n, n_levels) array).
    """
    diag = np.ascontiguousarray(diag, dtype=np.float64)
    off = np.ascontiguousarray(off, dtype=np.float64)
    n = diag.shape[0]
    off2 = off * off
    absoff = np.abs(off)
    radius = np.zeros(n)
    radius[:-1] += absoff
    radius[1:] += absoff
    lo0 = float(np.min(diag - radius))
    hi0 = float(np.max(diag + radius))
    tnorm = max(abs(lo0), abs(hi0), 1.0)
    pivmin = max(float(np.max(off2)) if n > 1 else 0.0, 1.0) * np.finfo(float).tiny * 1e4
    atol = 2.0 * _EPS * tnorm

    values = np.empty(n_levels)
    lo = lo0
    for level in range(n_levels):
        a, b = lo, hi0
        while b - a > atol + 2.0 * _EPS * max(abs(a), abs(b)):
            mid = 0.5 * (a + b)
            if _sturm_count(diag, off2, mid, pivmin) > level:
                b = mid
            else:
                a = mid
        values[level] = 0.5 * (a + b)
        lo = a

    vectors = np.empty((n, n_levels))
    rng_vec = np.cos(np.arange(n) * 0.7071) + 1.1
    for level in range(n_levels):
        lam = values[level]
        shift = lam + 10.0 * _EPS * tnorm
        dl, d, du, du2, swap = _gt_factor(off.copy(), diag - shift, off.copy())
        x = rng_vec / np.linalg.norm(rng_vec)
        for _ in range(4):
            x = _gt_solve(dl, d, du, du2, swap, x, _EPS * tnorm)
            for prev in range(level):
                x -= np.dot(vectors[:, prev], x) * vectors[:, prev]
            x /= np.linalg.norm(x)
        imax = int(np.argmax(np.abs(x)))
        if x[imax] < 0.0:
            x = -x
        vectors[:, level] = x
    return values, vectors


def s11_product(f, f_res, inv_qint, inv_qext, chunk=4096):
    """Complex reflection product over resonances at every grid frequency."""
    f = np.asarray(f, dtype=np.float64)
    f_res = np.asarray(f_res, dtype=np.float64)
    gi = np.asarray(inv_qint, dtype=np.float64)
    ge = np.asarray(inv_qext, dtype=np.float64)
    out = np.ones(f.shape[0], dtype=np.complex128)
    if f_res.size == 0:
        return out
    for start in range(0, f.shape[0], chunk):
        fc = f[start:start + chunk]
        delta = (fc[:, None] - f_res[None, :]) / f_res[None, :]
        num = 2j * delta - ge[None, :] + gi[None, :]
        den = 2j * delta + ge[None, :] + gi[None, :]
        out[start:start + chunk] = np.prod(num / den, axis=1)
    return out


def secular_bisect(corner, d, z2, origin, lo, hi, max_iter):
    """Bisect ``corner - x - sum z2_k / (d_k - x)`` for every root at once.

    Root ``i`` is sought as ``x = d[origin[i]] + mu`` with ``mu`` in
    ``[lo[i], hi[i]]``; the function decreases across each bracket.
    :return: midpoints ``mu`` of the final brackets.
    """
    lo = np.array(lo, dtype=np.float64)
    hi = np.array(hi, dtype=np.float64)
    base = d[origin]
    rel = d[None, :] - base[:, None]
    for _ in range(max_iter):
        done = hi - lo <= 4.0 * _EPS * np.maximum(np.abs(lo), np.abs(hi)) + 1e-300
        if np.all(done):
            break
        mu = 0.5 * (lo + hi)
        fval = corner - (base + mu) - np.sum(z2[None, :] / (rel - mu[:, None]), axis=1)
        go_right = (fval > 0.0) & ~done
        go_left = ~(fval > 0.0) & ~done
        lo = np.where(go_right, mu, lo)
        hi = np.where(go_left, mu, hi)
    return 0.5 * (lo + hi)
