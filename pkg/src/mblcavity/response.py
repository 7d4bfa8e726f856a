"""One-port reflection spectra from resonance products."""

import csv
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from ._backend import kernels
from .errors import InputError

DARK_WEIGHT = 1e-12
DEFAULT_STEP = 2e-6  # GHz
DIP_PROMINENCE_DB = 1.0


@dataclass(frozen=True)
class ReflectionSpectrum:
    f: np.ndarray
    s11_mag: np.ndarray

    @property
    def s11_db(self):
        with np.errstate(divide="ignore"):
            return 20.0 * np.log10(self.s11_mag)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["f_GHz", "s11_mag", "s11_db"])
            for f, m, d in zip(self.f, self.s11_mag, self.s11_db):
                w.writerow([f"{f:.9f}", f"{m:.12g}", f"{d:.9g}"])


@dataclass(frozen=True)
class DressedQualityFactors:
    """Inverse quality factors per resonance (``inv_q_int[i] = 1/Q_int``)."""

    inv_q_int: np.ndarray
    inv_q_ext: np.ndarray

    @property
    def q_int(self):
        with np.errstate(divide="ignore"):
            return 1.0 / self.inv_q_int

    @property
    def q_ext(self):
        with np.errstate(divide="ignore"):
            return 1.0 / self.inv_q_ext


def frequency_grid(center, half_width, step=DEFAULT_STEP):
    n = int(np.floor(2.0 * half_width / step)) + 1
    return center - half_width + step * np.arange(n)


def s11_product(f_grid, f_res, inv_q_int, inv_q_ext):
    """``prod_i (2i d_i - 1/Qe_i + 1/Qi_i) / (2i d_i + 1/Qe_i + 1/Qi_i)``, ``d_i = (f - f_i)/f_i``."""
    f_grid = np.ascontiguousarray(f_grid, dtype=np.float64)
    f_res = np.ascontiguousarray(f_res, dtype=np.float64)
    gi = np.ascontiguousarray(inv_q_int, dtype=np.float64)
    ge = np.ascontiguousarray(inv_q_ext, dtype=np.float64)
    if not (f_res.shape == gi.shape == ge.shape):
        raise InputError("resonance arrays must align")
    if not (np.all(np.isfinite(f_grid)) and np.all(np.isfinite(f_res))):
        raise InputError("frequencies must be finite")
    return np.asarray(kernels.s11_product(f_grid, f_res, gi, ge))


def s11_bare(f_grid, bare, q):
    """Reflection of the bare ladder with per-mode quality factors."""
    n = min(bare.N, q.N)
    s = s11_product(f_grid, bare.frequencies[:n], 1.0 / q.q_int[:n], 1.0 / q.q_ext[:n])
    return ReflectionSpectrum(f=np.asarray(f_grid, dtype=np.float64), s11_mag=np.abs(s))


def dressed_quality(sp, q, qubit_q=None):
    """Quality factors of the dressed high states.

    ``1/Q'_k = sum_i |W_ki|^2 / Q_i`` over bare high modes. The qubit column of
    ``W`` contributes only when ``qubit_q = (Q_int, Q_ext)`` is given; by
    default the qubit is lossless and uncoupled to the port.

    :return: :class:`DressedQualityFactors` over dressed modes ``1..N+1``; low
        modes keep their bare values.
    """
    j0, N = sp.j0, sp.N
    if q.N < N:
        raise InputError(f"quality factors cover {q.N} modes, need {N}")
    w2 = sp.W ** 2
    gi = w2[:, 1:] @ (1.0 / q.q_int[j0:N])
    ge = w2[:, 1:] @ (1.0 / q.q_ext[j0:N])
    if qubit_q is not None:
        gi = gi + w2[:, 0] / qubit_q[0]
        ge = ge + w2[:, 0] / qubit_q[1]
    return DressedQualityFactors(inv_q_int=np.concatenate([1.0 / q.q_int[:j0], gi]),
                                 inv_q_ext=np.concatenate([1.0 / q.q_ext[:j0], ge]))


def manybody_quality(es, dq):
    """``1/Q~_i = w_i / Q'_probe`` per eigenstate, ``w_i`` its probe weight.

    Sector states carry one high photon; only the probe state is a single
    photon, so the sum over high modes reduces to the probe term.
    """
    k = es.sector.probe_k
    w = es.sp_weight
    return DressedQualityFactors(inv_q_int=w * dq.inv_q_int[k - 1], inv_q_ext=w * dq.inv_q_ext[k - 1])


def s11_manybody(f_grid, systems, qualities):
    """Reflection from many-body resonances.

    :param systems: iterable of :class:`ManyBodyEigensystem`.
    :param qualities: matching iterable of :class:`DressedQualityFactors`
        from :func:`manybody_quality`.
    """
    f_res, gi, ge = [], [], []
    for es, mq in zip(systems, qualities):
        bright = es.sp_weight >= DARK_WEIGHT
        f_res.append(es.frequencies[bright])
        gi.append(mq.inv_q_int[bright])
        ge.append(mq.inv_q_ext[bright])
    f_res = np.concatenate(f_res) if f_res else np.empty(0)
    s = s11_product(f_grid, f_res, np.concatenate(gi) if gi else np.empty(0),
                    np.concatenate(ge) if ge else np.empty(0))
    return ReflectionSpectrum(f=np.asarray(f_grid, dtype=np.float64), s11_mag=np.abs(s))


def s11_dressed(f_grid, sp, dq, modes=None):
    """Reflection of the dressed single-particle ladder (no interaction)."""
    idx = np.arange(sp.f_dressed.shape[0]) if modes is None else np.asarray(modes) - 1
    s = s11_product(f_grid, sp.f_dressed[idx], dq.inv_q_int[idx], dq.inv_q_ext[idx])
    return ReflectionSpectrum(f=np.asarray(f_grid, dtype=np.float64), s11_mag=np.abs(s))


def count_resonances(spectrum, prominence_db=DIP_PROMINENCE_DB):
    """Number of local |S11| minima with at least ``prominence_db`` dB prominence."""
    peaks, _ = find_peaks(-spectrum.s11_db, prominence=prominence_db)
    return int(peaks.size)


def resonance_frequencies(spectrum, prominence_db=DIP_PROMINENCE_DB):
    peaks, _ = find_peaks(-spectrum.s11_db, prominence=prominence_db)
    return spectrum.f[peaks]
