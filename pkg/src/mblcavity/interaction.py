"""Three-wave-mixing interaction between high and low modes.

V/h = g sum_{j <= j0 < k, k'} sqrt(j) A_kk' a+_j a+_k' a_k + h.c.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .line import mode_spacing
from .states import FockState

R_Q = 6.4538  # kOhm, h / (2e)^2


@dataclass(frozen=True)
class InteractionParams:
    """Interaction scale ``g_scale`` (GHz) and the symmetric matrix ``A``.

    ``A[r, c]`` couples high modes ``j0 + 1 + r`` and ``j0 + 1 + c``.
    """

    g_scale: float
    A: np.ndarray
    j0: int

    @property
    def high_modes(self):
        return range(self.j0 + 1, self.j0 + 1 + self.A.shape[0])

    def a(self, k, kp):
        return self.A[k - self.j0 - 1, kp - self.j0 - 1]


def interaction_scale(qubit, line, Gamma):
    """``g = Delta(f_eg)^2 / Gamma * sqrt(R_Q / (32 pi Z_inf)) * dipole_asym`` in GHz."""
    spacing = mode_spacing(qubit.f_eg, line)
    return spacing * spacing / Gamma * math.sqrt(R_Q / (32.0 * math.pi * line.Z_inf)) * qubit.dipole_asym


def coupling_matrix(sp):
    """``A_kk' = W_k0 W_k'0 / max_m W_m0^2`` over the dressed high states."""
    w0 = np.asarray(sp.W[:, 0], dtype=np.float64)
    peak = float(np.max(w0 * w0))
    if peak == 0.0:
        raise DomainError("qubit is decoupled from every high mode")
    a = np.outer(w0, w0) / peak
    m = int(np.argmax(w0 * w0))
    a[m, m] = 1.0
    return a


def build_interaction(qubit, sp, line, Gamma):
    return InteractionParams(g_scale=interaction_scale(qubit, line, Gamma),
                             A=coupling_matrix(sp), j0=sp.j0)


def _amp(ip, j, k, kp, bosonic):
    # one expression for both branches keeps <m|V|n> and <n|V|m> bit-identical
    return ip.g_scale * math.sqrt(j) * ip.a(k, kp) * math.sqrt(bosonic)


def apply_V(state, ip, f=None):
    """Images of ``V|state>`` as ``[(FockState, amplitude GHz), ...]``.

    Terms landing on the same state are summed; images are sorted canonically.

    :param f: optional dressed frequencies; when given, high modes beyond its
        length are skipped.
    """
    occ = state.as_dict()
    j0 = ip.j0
    high = list(ip.high_modes)
    if f is not None:
        high = [k for k in high if k <= len(f)]
    out = {}

    def add(counts, amp):
        key = FockState.from_counts(counts)
        out[key] = out.get(key, 0.0) + amp

    occupied_high = [k for k in sorted(occ) if k > j0 and k in ip.high_modes]
    occupied_low = [j for j in sorted(occ) if j <= j0]
    # down-conversion: a+_j a+_k' a_k
    for k in occupied_high:
        nk = occ[k]
        for kp in high:
            nkp_after = occ.get(kp, 0) - (1 if kp == k else 0)
            for j in range(1, j0 + 1):
                nj = occ.get(j, 0)
                bosonic = nk * (nkp_after + 1) * (nj + 1)
                counts = dict(occ)
                counts[k] -= 1
                counts[kp] = counts.get(kp, 0) + 1
                counts[j] = nj + 1
                add(counts, _amp(ip, j, k, kp, bosonic))
    # up-conversion: a+_k a_k' a_j
    for j in occupied_low:
        nj = occ[j]
        for kp in occupied_high:
            nkp = occ[kp]
            for k in high:
                nk_after = occ.get(k, 0) - (1 if k == kp else 0)
                bosonic = nj * nkp * (nk_after + 1)
                counts = dict(occ)
                counts[j] -= 1
                counts[kp] -= 1
                counts[k] = counts.get(k, 0) + 1
                add(counts, _amp(ip, j, k, kp, bosonic))
    return sorted((s, a) for s, a in out.items())
