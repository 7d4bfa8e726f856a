"""Dense symmetric eigensolvers and a Nelder-Mead minimizer.

All matrices handled by the package are real symmetric and small (a few
hundred rows at most), so cyclic Jacobi is used as the general solver. Two
structured fast paths sit next to it: Sturm bisection for the lowest levels of
a tridiagonal matrix, and a secular-equation solver for arrowhead matrices.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import InputError, NumericalError

log = logging.getLogger(__name__)

JACOBI_MAX_SWEEPS = 100
JACOBI_REL_TOL = 1e-12


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues in ascending order with orthonormal eigenvectors as columns."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def dimension(self):
        return self.values.shape[0]


@dataclass(frozen=True)
class SimplexResult:
    best_params: np.ndarray
    best_objective: float
    iterations: int
    converged: bool
    n_evaluations: int = 0


def as_symmetric(m):
    """Validate ``m`` as a finite, exactly symmetric square matrix.

    :raises InputError: on shape mismatch, non-finite entries or asymmetry.
    """
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise InputError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError("matrix contains non-finite entries")
    if not np.array_equal(a, a.T):
        raise InputError("matrix is not symmetric")
    return a


def _sorted_system(values, vectors):
    order = np.argsort(values, kind="stable")
    return EigenSystem(values=np.ascontiguousarray(values[order]),
                       vectors=np.ascontiguousarray(vectors[:, order]))


def eigh_symmetric(m):
    """Full eigendecomposition of a real symmetric matrix by cyclic Jacobi.

    Sweeps stop once the off-diagonal Frobenius norm drops below
    ``1e-12 * ||m||_F``; 100 sweeps is the hard cap.

    :raises InputError: if ``m`` is not finite and symmetric.
    :raises NumericalError: if the sweep cap is reached; ``diagnostics`` holds
        the residual off-diagonal norm and the partial eigenpairs.
    """
    a = as_symmetric(m)
    if a.shape[0] == 1:
        return EigenSystem(values=a[0].copy(), vectors=np.ones((1, 1)))
    norm = float(np.linalg.norm(a))
    tol = JACOBI_REL_TOL * norm
    diag, vecs, sweeps, off, converged = kernels.jacobi_eigh(a, tol, JACOBI_MAX_SWEEPS)
    if not converged:
        raise NumericalError(
            f"Jacobi did not converge in {sweeps} sweeps (off-diagonal norm {off:.3e})",
            diagnostics={"sweeps": sweeps, "off_norm": off, "values": diag, "vectors": vecs},
        )
    return _sorted_system(diag, vecs)


def eigh_tridiagonal_lowest(diag, off, n_levels):
    """Lowest ``n_levels`` eigenpairs of a symmetric tridiagonal matrix.

    :param diag: main diagonal, length n.
    :param off: first off-diagonal, length n - 1.
    """
    diag = np.asarray(diag, dtype=np.float64)
    off = np.asarray(off, dtype=np.float64)
    if diag.ndim != 1 or off.shape != (max(diag.shape[0] - 1, 0),):
        raise InputError("inconsistent tridiagonal shapes")
    if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(off))):
        raise InputError("tridiagonal matrix contains non-finite entries")
    if not 1 <= n_levels <= diag.shape[0]:
        raise InputError(f"n_levels must be in [1, {diag.shape[0]}]")
    values, vectors = kernels.tridiag_lowest(diag, off, int(n_levels))
    return EigenSystem(values=np.asarray(values), vectors=np.asarray(vectors))


def arrowhead_eigh(corner, poles, couplings):
    """Eigendecomposition of the arrowhead matrix ``[[corner, z^T], [z, diag(poles)]]``.

    Roots of the secular equation ``corner - x - sum z_k^2 / (d_k - x) = 0``
    are bracketed between consecutive poles and bisected in coordinates
    relative to the nearer pole, which keeps the gaps ``d_k - x`` accurate and
    the eigenvectors ``(1, z_k / (x - d_k))`` orthogonal. Zero couplings
    deflate exactly. Repeated poles fall back to Jacobi.

    Row/column 0 is the corner. Eigenvectors are returned as columns.
    """
    poles = np.asarray(poles, dtype=np.float64)
    z = np.asarray(couplings, dtype=np.float64)
    n = poles.shape[0]
    if z.shape != (n,):
        raise InputError("couplings and poles must have equal length")
    if not (np.all(np.isfinite(poles)) and np.all(np.isfinite(z)) and math.isfinite(corner)):
        raise InputError("arrowhead matrix contains non-finite entries")

    live = z != 0.0
    dl = poles[live]
    if dl.size and np.any(np.diff(np.sort(dl)) == 0.0):
        full = np.diag(np.concatenate([[corner], poles]))
        full[0, 1:] = z
        full[1:, 0] = z
        return eigh_symmetric(full)

    values = [poles[~live]]
    vec_blocks = []
    dead_idx = np.flatnonzero(~live)
    dead_vecs = np.zeros((n + 1, dead_idx.size))
    dead_vecs[dead_idx + 1, np.arange(dead_idx.size)] = 1.0
    vec_blocks.append(dead_vecs)

    live_idx = np.flatnonzero(live)
    if live_idx.size == 0:
        values.append(np.array([corner]))
        e0 = np.zeros((n + 1, 1))
        e0[0, 0] = 1.0
        vec_blocks.append(e0)
    else:
        order = np.argsort(dl)
        d = dl[order]
        zz = z[live][order]
        lam, gaps = _secular_roots(corner, d, zz)
        # eigenvector components: corner 1, pole k -> z_k / (x - d_k) = -z_k / gap_k
        comps = -zz[None, :] / gaps
        norms = np.sqrt(1.0 + np.sum(comps * comps, axis=1))
        vecs = np.zeros((n + 1, lam.size))
        vecs[0, :] = 1.0 / norms
        vecs[live_idx[order] + 1, :] = (comps / norms[:, None]).T
        values.append(lam)
        vec_blocks.append(vecs)

    vals = np.concatenate(values)
    vecs = np.concatenate(vec_blocks, axis=1)
    for j in range(vecs.shape[1]):
        imax = int(np.argmax(np.abs(vecs[:, j])))
        if vecs[imax, j] < 0.0:
            vecs[:, j] = -vecs[:, j]
    return _sorted_system(vals, vecs)


def _secular_roots(corner, d, z):
    """All m + 1 roots of the secular equation for sorted distinct poles ``d``.

    :return: (roots, gaps) where ``gaps[i, k] = d_k - root_i`` computed
        without cancellation.
    """
    m = d.size
    z2 = z * z
    znorm = math.sqrt(float(np.sum(z2)))
    lower = min(corner, d[0]) - znorm - 1.0
    upper = max(corner, d[-1]) + znorm + 1.0
    left = np.concatenate([[lower], d])
    right = np.concatenate([d, [upper]])
    n_roots = m + 1

    def secular(origin_idx, mu):
        # gaps relative to origin pole: d_k - (d_origin + mu)
        gap = (d[None, :] - d[origin_idx][:, None]) - mu[:, None]
        return corner - (d[origin_idx] + mu) - np.sum(z2[None, :] / gap, axis=1), gap

    # choose origin: the pole at the end of the bracket nearer to the root
    origin = np.empty(n_roots, dtype=int)
    mid = 0.5 * (left + right)
    fmid = corner - mid - np.sum(z2[None, :] / (d[None, :] - mid[:, None]), axis=1)
    for i in range(n_roots):
        if i == 0:
            origin[i] = 0
        elif i == m:
            origin[i] = m - 1
        else:
            # F decreases across the bracket: F(mid) > 0 puts the root in the right half
            origin[i] = i if fmid[i] > 0.0 else i - 1
    lo = left - d[origin]
    hi = right - d[origin]
    for i in range(n_roots):
        if 0 < i < m:
            if origin[i] == i:
                lo[i], hi[i] = mid[i] - d[i], right[i] - d[i]
            else:
                lo[i], hi[i] = left[i] - d[i - 1], mid[i] - d[i - 1]
    mu = np.asarray(kernels.secular_bisect(float(corner), d, z2, origin.astype(np.int64),
                                           lo.astype(float), hi.astype(float), 200))
    _, gaps = secular(origin, mu)
    roots = d[origin] + mu
    return roots, gaps


def nelder_mead(objective, start, scale, tol=1e-8, max_iter=2000,
                reflect=1.0, expand=2.0, contract=0.5, shrink=0.5):
    """Minimize ``objective`` by the Nelder-Mead downhill simplex.

    The initial simplex places vertex ``i`` at ``start + scale[i] * e_i``.
    Convergence is declared when the simplex diameter, measured per coordinate
    in units of ``scale``, drops below ``tol``, or when all vertex values and
    the value at the simplex centroid coincide. Non-finite objective values are treated as ``+inf``.
    """
    x0 = np.asarray(start, dtype=np.float64).ravel()
    step = np.broadcast_to(np.asarray(scale, dtype=np.float64), x0.shape).copy()
    if np.any(step <= 0.0):
        raise InputError("scale must be strictly positive in every coordinate")
    n = x0.size
    n_eval = 0

    def fun(x):
        nonlocal n_eval
        n_eval += 1
        val = float(objective(x.copy()))
        if not math.isfinite(val):
            log.warning("objective returned %r at %s; treating as +inf", val, x)
            return math.inf
        return val

    f0 = fun(x0)
    if not math.isfinite(f0):
        raise InputError("objective must be finite at the start point")
    simplex = np.vstack([x0] + [x0 + step[i] * np.eye(n)[i] for i in range(n)])
    fvals = np.array([f0] + [fun(simplex[i + 1]) for i in range(n)])

    def diameter():
        return float(np.max(np.abs(simplex[1:] - simplex[0]) / step)) if n else 0.0

    iterations = 0
    converged = False
    while True:
        order = np.argsort(fvals, kind="stable")
        simplex = simplex[order]
        fvals = fvals[order]
        if diameter() < tol:
            converged = True
            break
        if np.all(fvals == fvals[0]) and fun(simplex.mean(axis=0)) == fvals[0]:
            # flat simplex with a flat interior: nothing left to descend
            converged = True
            break
        if iterations >= max_iter:
            break
        iterations += 1
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + reflect * (centroid - worst)
        fr = fun(xr)
        if fr < fvals[0]:
            xe = centroid + expand * (xr - centroid)
            fe = fun(xe)
            if fe < fr:
                simplex[-1], fvals[-1] = xe, fe
            else:
                simplex[-1], fvals[-1] = xr, fr
            continue
        if fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
            continue
        if fr < fvals[-1]:
            xc = centroid + contract * (xr - centroid)
            fc = fun(xc)
            if fc <= fr:
                simplex[-1], fvals[-1] = xc, fc
                continue
        else:
            xc = centroid + contract * (worst - centroid)
            fc = fun(xc)
            if fc < fvals[-1]:
                simplex[-1], fvals[-1] = xc, fc
                continue
        best = simplex[0].copy()
        for i in range(1, n + 1):
            simplex[i] = best + shrink * (simplex[i] - best)
            fvals[i] = fun(simplex[i])

    return SimplexResult(best_params=simplex[0].copy(), best_objective=float(fvals[0]),
                         iterations=iterations, converged=converged, n_evaluations=n_eval)
