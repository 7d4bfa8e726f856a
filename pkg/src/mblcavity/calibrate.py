"""Least-squares extraction of line and circuit parameters from mode frequencies."""

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundaryError, DomainError, InputError, MBLCavityError
from .line import dispersion
from .numerics import nelder_mead

DEFAULT_SIGMA = 1e-3  # GHz
UNBOUNDED_FP = 1e3  # GHz


@dataclass(frozen=True)
class SpectroscopyData:
    """Measured dressed-mode frequencies ``f[i]`` of mode ``k[i]`` at flux ``phi[i]`` (units of 2 pi)."""

    phi: np.ndarray
    k: np.ndarray
    f: np.ndarray
    sigma: np.ndarray
    sigma_given: bool = True

    def __post_init__(self):
        n = self.f.shape[0]
        if not (self.phi.shape == self.k.shape == self.sigma.shape == (n,)):
            raise InputError("spectroscopy columns must have equal length")
        if np.any(self.f <= 0) or np.any(self.sigma <= 0):
            raise InputError("frequencies and uncertainties must be positive")
        pairs = set(zip(self.phi.tolist(), self.k.tolist()))
        if len(pairs) != n:
            raise InputError("duplicate (phi, mode) pairs in spectroscopy data")

    @classmethod
    def from_records(cls, records, default_sigma=DEFAULT_SIGMA):
        """Build from ``(phi_over_2pi, mode_k, f_GHz[, sigma_GHz])`` tuples."""
        rows = [tuple(r) for r in records]
        if not rows:
            raise InputError("no spectroscopy records")
        given = all(len(r) > 3 and r[3] is not None for r in rows)
        sigma = [float(r[3]) if len(r) > 3 and r[3] is not None else default_sigma for r in rows]
        return cls(phi=np.array([float(r[0]) for r in rows]), k=np.array([int(r[1]) for r in rows]),
                   f=np.array([float(r[2]) for r in rows]), sigma=np.array(sigma), sigma_given=given)

    def at_flux(self, phi):
        sel = self.phi == phi
        return SpectroscopyData(self.phi[sel], self.k[sel], self.f[sel], self.sigma[sel], self.sigma_given)

    @property
    def fluxes(self):
        return np.unique(self.phi)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["phi_over_2pi", "mode_k", "f_GHz", "sigma_GHz"])
            for row in zip(self.phi, self.k, self.f, self.sigma):
                w.writerow([repr(float(row[0])), int(row[1]), repr(float(row[2])), repr(float(row[3]))])


def read_spectroscopy(path, default_sigma=DEFAULT_SIGMA):
    """Parse ``phi_over_2pi,mode_k,f_GHz[,sigma_GHz]``; errors name the file and line."""
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise InputError(f"{path}: empty file")
        header = [h.strip() for h in header]
        need = ["phi_over_2pi", "mode_k", "f_GHz"]
        if header[:3] != need:
            raise InputError(f"{path}:1: header must start with {','.join(need)}")
        has_sigma = len(header) > 3 and header[3] == "sigma_GHz"
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                phi, k, f = float(row[0]), int(row[1]), float(row[2])
                sig = float(row[3]) if has_sigma and len(row) > 3 and row[3].strip() else None
            except (ValueError, IndexError) as exc:
                raise InputError(f"{path}:{lineno}: malformed row {','.join(row)!r}") from exc
            if not (math.isfinite(f) and f > 0):
                raise InputError(f"{path}:{lineno}: frequency must be positive")
            if sig is not None and not sig > 0:
                raise InputError(f"{path}:{lineno}: sigma must be positive")
            records.append((phi, k, f, sig))
    return SpectroscopyData.from_records(records, default_sigma=default_sigma)


@dataclass
class FitReport:
    names: tuple
    values: np.ndarray
    uncertainties: np.ndarray
    residual_rms: float
    objective: float
    start_objective: float
    iterations: int
    converged: bool
    flags: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self):
        return self.converged and not self.flags

    def as_dict(self):
        return dict(zip(self.names, self.values.tolist()))

    def to_json(self):
        return {
            "parameters": {n: {"value": float(v), "uncertainty": float(u)}
                           for n, v, u in zip(self.names, self.values, self.uncertainties)},
            "residual_rms_GHz": self.residual_rms,
            "objective": self.objective,
            "start_objective": self.start_objective,
            "iterations": self.iterations,
            "converged": self.converged,
            "flags": list(self.flags),
            "notes": list(self.notes),
        }

    def summary(self):
        lines = [f"converged: {self.converged}  iterations: {self.iterations}  "
                 f"residual rms: {self.residual_rms * 1e3:.4g} MHz"]
        for n, v, u in zip(self.names, self.values, self.uncertainties):
            lines.append(f"  {n:6s} = {v:.8g} +/- {u:.3g}")
        lines.extend(f"  flag: {f}" for f in self.flags)
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines) + "\n"


def finite_hessian(fun, x, step):
    """Central-difference Hessian of ``fun`` at ``x`` with per-coordinate ``step``."""
    n = x.size
    h = np.zeros((n, n))
    f0 = fun(x)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = step[i]
        h[i, i] = (fun(x + ei) - 2.0 * f0 + fun(x - ei)) / step[i] ** 2
        for j in range(i):
            ej = np.zeros(n)
            ej[j] = step[j]
            h[i, j] = h[j, i] = (fun(x + ei + ej) - fun(x + ei - ej) - fun(x - ei + ej)
                                 + fun(x - ei - ej)) / (4.0 * step[i] * step[j])
    return h


def _covariance(chi2, x, step, dof_scale):
    """``2 H^-1`` of a chi-square at its minimum, plus a degeneracy verdict."""
    h = finite_hessian(chi2, x, step)
    if not np.all(np.isfinite(h)):
        return np.full(x.size, math.inf), True
    # work in step units so the conditioning test is scale free
    hs = h * np.outer(step, step)
    evals = np.linalg.eigvalsh(hs)
    degenerate = not (evals[0] > 1e-9 * max(evals[-1], 1e-300))
    if degenerate:
        return np.full(x.size, math.inf), True
    cov = 2.0 * np.linalg.inv(hs) * np.outer(step, step) * dof_scale
    return np.sqrt(np.clip(np.diag(cov), 0.0, None)), False


def _minimize(chi2, start, scale, tol, max_iter, restarts=2):
    # restarting from the best vertex recovers from premature simplex collapse
    res = nelder_mead(chi2, start, scale, tol=tol, max_iter=max_iter)
    iterations = res.iterations
    for _ in range(restarts):
        if not res.converged:
            break
        again = nelder_mead(chi2, res.best_params, scale * 1e-2, tol=tol * 1e2, max_iter=max_iter)
        iterations += again.iterations
        improved = again.best_objective < res.best_objective
        res = again if improved else res
        if not improved:
            break
    return res, iterations


def dispersion_model(k, v, f_p, ell, delta_k0=0.0):
    x = (np.asarray(k, dtype=float) + delta_k0) * v / (2.0 * ell) * 1e-9
    return dispersion(x, f_p)


def fit_dispersion(data, ell=6e-3, start=(2.3e6, 25.0), delta_k0=0.0, tol=1e-10, max_iter=4000):
    """Fit ``(v, f_p)`` of the bare ladder to zero-flux mode frequencies.

    The plasma frequency is optimized as ``u = 1/f_p`` so that a ladder with no
    visible curvature converges to ``u = 0`` instead of running away; such fits
    are flagged ``f_p unbounded``.
    """
    if np.unique(data.k).size < 5:
        raise InputError("dispersion fit needs at least 5 distinct modes")
    k, f, sig = data.k, data.f, data.sigma

    def unpack(p):
        return p[0] * 1e6, p[1]

    def chi2(p):
        v, u = unpack(p)
        if v <= 0:
            return math.inf
        x = (k + delta_k0) * v / (2.0 * ell) * 1e-9
        model = x / np.sqrt(1.0 + (x * u) ** 2)
        return float(np.sum(((model - f) / sig) ** 2))

    p0 = np.array([start[0] * 1e-6, 1.0 / start[1]])
    scale = np.array([0.05, 0.005])
    start_obj = chi2(p0)
    res, iterations = _minimize(chi2, p0, scale, tol, max_iter)
    p = res.best_params
    v, u = unpack(p)
    dof = max(k.size - 2, 1)
    dof_scale = 1.0 if data.sigma_given else max(res.best_objective / dof, 1.0)
    step = np.maximum(np.abs(p) * 1e-4, scale * 1e-4)
    err, degenerate = _covariance(chi2, p, step, dof_scale)
    flags, notes = [], []
    f_p = 1.0 / abs(u) if u != 0.0 else math.inf
    err_fp = err[1] / (u * u) if u != 0.0 else math.inf
    if f_p > UNBOUNDED_FP or not err[1] < abs(u):
        flags.append("f_p unbounded: data show no resolvable plasma curvature")
    if degenerate:
        flags.append("degenerate Hessian at optimum")
    if not res.converged:
        flags.append("optimizer did not converge")
    if not data.sigma_given:
        notes.append(f"sigma absent; {DEFAULT_SIGMA * 1e3:g} MHz assumed and uncertainties scaled by reduced chi2")
    resid = dispersion_model(k, v, f_p, ell, delta_k0) - f
    return FitReport(names=("v", "f_p"), values=np.array([v, f_p]),
                     uncertainties=np.array([err[0] * 1e6, err_fp]),
                     residual_rms=float(np.sqrt(np.mean(resid ** 2))), objective=res.best_objective,
                     start_objective=start_obj, iterations=iterations, converged=res.converged,
                     flags=flags, notes=notes)


def circuit_model(params, data, names=("E_J", "E_C", "E_L"), values=None):
    """Dressed mode frequencies predicted at every data point.

    :param params: base :class:`~mblcavity.params.CircuitParams`.
    :param values: optional overrides for ``names``.
    """
    from .pipeline import single_particle

    if values is not None:
        params = params.replace(**dict(zip(names, (float(v) for v in values))))
    out = np.empty(data.f.shape[0])
    for phi in data.fluxes:
        sel = data.phi == phi
        sp = single_particle(params, float(phi)).sp
        if np.any(data.k[sel] > sp.f_dressed.shape[0]):
            raise InputError("data reference modes beyond the model ladder")
        out[sel] = sp.f_dressed[data.k[sel] - 1]
    return out


def fit_circuit(data, params, start=None, tol=1e-9, max_iter=3000, scale=None, restarts=2,
                estimate_errors=True):
    """Fit ``(E_J, E_C, E_L)`` through the fluxonium and hybridization model.

    Line parameters and Gamma are held at the values in ``params``.

    :param start: guess ``(E_J, E_C, E_L)``; defaults to the values in ``params``.
    :param scale: initial simplex steps; 10% of the guess by default.
    :param estimate_errors: skip the Hessian (uncertainties NaN) when False.
    """
    names = ("E_J", "E_C", "E_L")
    p0 = np.array(start if start is not None else [params.E_J, params.E_C, params.E_L], dtype=float)
    if np.any(p0 <= 0):
        raise InputError("starting energies must be positive")
    f, sig = data.f, data.sigma

    def chi2(p):
        if np.any(p <= 0):
            return math.inf
        try:
            model = circuit_model(params, data, names, p)
        except (BoundaryError, DomainError, InputError):
            return math.inf
        except MBLCavityError:
            return math.inf
        return float(np.sum(((model - f) / sig) ** 2))

    scale = 0.1 * p0 if scale is None else np.broadcast_to(np.asarray(scale, dtype=float), p0.shape)
    start_obj = chi2(p0)
    if not math.isfinite(start_obj):
        raise InputError("model cannot be evaluated at the starting guess")
    res, iterations = _minimize(chi2, p0, scale, tol, max_iter, restarts)
    p = res.best_params
    flags, notes = [], []
    if data.fluxes.size < 2:
        flags.append("degenerate: single flux point constrains only the qubit frequency there")
    dof = max(f.size - 3, 1)
    dof_scale = 1.0 if data.sigma_given else max(res.best_objective / dof, 1.0)
    if estimate_errors:
        err, degenerate = _covariance(chi2, p, np.abs(p) * 1e-4, dof_scale)
    else:
        err, degenerate = np.full(3, math.nan), False
    if degenerate and not flags:
        flags.append("degenerate Hessian at optimum")
    if np.any(p < 1e-3 * np.abs(p0)):
        flags.append("parameter pinned near zero")
    if not res.converged:
        flags.append("optimizer did not converge")
    if not data.sigma_given:
        notes.append(f"sigma absent; {DEFAULT_SIGMA * 1e3:g} MHz assumed and uncertainties scaled by reduced chi2")
    resid = circuit_model(params, data, names, p) - f
    return FitReport(names=names, values=p.copy(), uncertainties=err,
                     residual_rms=float(np.sqrt(np.mean(resid ** 2))), objective=res.best_objective,
                     start_objective=start_obj, iterations=iterations, converged=res.converged,
                     flags=flags, notes=notes)


def synthetic_dispersion_data(params, modes, noise=0.0, rng=None, sigma=None):
    """Zero-flux bare frequencies from ``params`` with optional Gaussian noise (GHz)."""
    modes = np.asarray(modes)
    f = dispersion_model(modes, params.v, params.f_p, params.ell, params.delta_k0)
    if noise:
        f = f + rng.normal(0.0, noise, f.shape)
    s = sigma if sigma is not None else (noise or DEFAULT_SIGMA)
    return SpectroscopyData(phi=np.zeros(modes.size), k=modes.astype(int), f=f,
                            sigma=np.full(modes.size, s), sigma_given=True)


def synthetic_circuit_data(params, fluxes, modes, noise=0.0, rng=None, sigma=None):
    """Dressed frequencies of ``modes`` at each flux from the forward model."""
    phi = np.repeat(np.asarray(fluxes, dtype=float), len(modes))
    k = np.tile(np.asarray(modes, dtype=int), len(fluxes))
    s = sigma if sigma is not None else (noise or DEFAULT_SIGMA)
    data = SpectroscopyData(phi=phi, k=k, f=np.ones(phi.size), sigma=np.full(phi.size, s))
    f = circuit_model(params, data)
    if noise:
        f = f + rng.normal(0.0, noise, f.shape)
    return SpectroscopyData(phi=phi, k=k, f=f, sigma=data.sigma, sigma_given=True)


def write_report(report, path):
    with open(path, "w") as fh:
        json.dump(report.to_json(), fh, indent=1, sort_keys=True)
        fh.write("\n")
