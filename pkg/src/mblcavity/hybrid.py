"""Single-particle hybridization of the qubit with the high-frequency line modes.

The linear problem is an arrowhead matrix: the qubit transition ``f_eg`` in
the corner, bare modes ``j0 + 1 .. N`` on the diagonal and couplings ``g_k``
along the first row. Low modes ``k <= j0`` are not hybridized.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .line import mode_spacing
from .numerics import arrowhead_eigh


@dataclass(frozen=True)
class CouplingModel:
    """Parametrization of the qubit-line couplings.

    ``g_k = sqrt(Gamma * Delta(f_eg) / 2pi) * sqrt(f_k / f_eg)``.

    :param lamb_compensation: subtract the level shift the ladder imposes on the
        qubit, so that the hybridization window stays centred on ``f_eg``.
        Without it the sqrt(f) growth of the couplings pulls the qubit-like
        state roughly 1.5 GHz below ``f_eg`` at half flux.
    """

    Gamma: float = 1.0
    j0: int = 20
    N: int = 200
    lamb_compensation: bool = True

    def __post_init__(self):
        if not (0 < self.j0 < self.N):
            raise InputError(f"need 0 < j0 < N, got j0={self.j0}, N={self.N}")
        if not (math.isfinite(self.Gamma) and self.Gamma > 0):
            raise InputError("Gamma must be positive")

    def couplings(self, f_eg, f_high, line):
        width = self.Gamma * mode_spacing(f_eg, line) / (2.0 * math.pi)
        return math.sqrt(width) * np.sqrt(np.asarray(f_high) / f_eg)

    def qubit_energy(self, f_eg, f_high, g, line):
        """Corner entry of the arrowhead: ``f_eg`` plus the optional counter-shift."""
        if not self.lamb_compensation:
            return float(f_eg)
        d = np.asarray(f_high) - f_eg
        broad = mode_spacing(f_eg, line)
        return float(f_eg + np.sum(g * g * d / (d * d + broad * broad)))


@dataclass(frozen=True)
class SingleParticleSolution:
    """Dressed ladder at one flux point.

    ``f_dressed[k - 1]`` is dressed mode ``k`` for ``k = 1..N+1``. ``W`` has one
    row per dressed high state (dressed mode ``j0 + 1 + r`` is row ``r``);
    column 0 is the qubit amplitude and column ``c >= 1`` bare mode ``j0 + c``.
    """

    phi_ext: float
    f_eg: float
    f_dressed: np.ndarray
    W: np.ndarray
    j0: int
    N: int

    @property
    def qubit_amplitudes(self):
        return self.W[:, 0]

    @property
    def high_modes(self):
        return np.arange(self.j0 + 1, self.N + 2)

    def f(self, k):
        return self.f_dressed[k - 1]


def hybridize(qubit, bare, cm, line=None):
    """Diagonalize the qubit + high-mode arrowhead at the qubit's flux point.

    :param line: line parameters used for ``Delta(f_eg)``; defaults to the
        parameters the bare ladder was built from.
    """
    line = line or bare.line
    if not math.isfinite(qubit.f_eg):
        raise InputError("qubit frequency must be finite")
    if bare.N < cm.N:
        raise InputError(f"bare ladder has {bare.N} modes, coupling model needs {cm.N}")
    f_bare = bare.frequencies[:cm.N]
    f_high = f_bare[cm.j0:]
    g = cm.couplings(qubit.f_eg, f_high, line)
    corner = cm.qubit_energy(qubit.f_eg, f_high, g, line)
    es = arrowhead_eigh(corner, f_high, g)
    f_dressed = np.concatenate([f_bare[:cm.j0], es.values])
    return SingleParticleSolution(phi_ext=qubit.phi_ext, f_eg=qubit.f_eg, f_dressed=f_dressed,
                                  W=np.ascontiguousarray(es.vectors.T), j0=cm.j0, N=cm.N)


def decoupled(qubit, bare, cm):
    """Zero-coupling solution: the qubit joins the ladder as an extra mode."""
    f_bare = bare.frequencies[:cm.N]
    f_high = f_bare[cm.j0:]
    es = arrowhead_eigh(float(qubit.f_eg), f_high, np.zeros_like(f_high))
    return SingleParticleSolution(phi_ext=qubit.phi_ext, f_eg=qubit.f_eg,
                                  f_dressed=np.concatenate([f_bare[:cm.j0], es.values]),
                                  W=np.ascontiguousarray(es.vectors.T), j0=cm.j0, N=cm.N)


def qubit_weight_profile(sp):
    """``[(f_k, |W_k0|^2), ...]`` over the dressed high states."""
    f = sp.f_dressed[sp.j0:]
    w = sp.W[:, 0] ** 2
    return list(zip(f.tolist(), w.tolist()))


def spacing_dip(sp, line):
    """Locate the hybridization dip in the dressed spacing.

    The deficit ``Delta(f) - (f_{k+1} - f_k)`` at mode midpoints peaks where
    modes are pulled together around the qubit.

    :return: (centre GHz, full width at half maximum GHz, depth GHz).
    """
    f = sp.f_dressed[sp.j0:]
    mid = 0.5 * (f[1:] + f[:-1])
    deficit = mode_spacing(mid, line) - np.diff(f)
    m = int(np.argmax(deficit))
    half = 0.5 * deficit[m]
    lo = m
    while lo > 0 and deficit[lo] > half:
        lo -= 1
    hi = m
    while hi < deficit.size - 1 and deficit[hi] > half:
        hi += 1
    f_lo = np.interp(half, [deficit[lo], deficit[lo + 1]], [mid[lo], mid[lo + 1]])
    f_hi = np.interp(half, [deficit[hi], deficit[hi - 1]], [mid[hi], mid[hi - 1]])
    return float(mid[m]), float(f_hi - f_lo), float(deficit[m])
