"""Josephson transmission line: dispersive mode ladder and per-mode quality factors.

Frequencies are in GHz, the line length in meters and the light speed in m/s.
"""

import csv
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InputError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LineParams:
    """Propagation constants of the line.

    ``delta_k0`` shifts the effective mode index (``x_k = (k + delta_k0) v / 2l``)
    as a crude stand-in for the reflection phase at the antenna end.
    """

    v: float = 2.36e6
    ell: float = 6e-3
    f_p: float = 26.94
    Z_inf: float = 8.97
    delta_k0: float = 0.0

    def __post_init__(self):
        for name in ("v", "ell", "f_p", "Z_inf"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise InputError(f"{name} must be positive and finite, got {val!r}")
        if not self.spacing0 < self.f_p:
            raise InputError(f"v/2l = {self.spacing0:.4g} GHz must lie below f_p = {self.f_p} GHz")

    @property
    def spacing0(self):
        """Dispersionless free spectral range ``v / 2l`` in GHz."""
        return self.v / (2.0 * self.ell) * 1e-9


@dataclass(frozen=True)
class BareModeSet:
    """Bare standing-wave frequencies ``f_k`` for ``k = 1..N`` (``frequencies[k - 1]``)."""

    frequencies: np.ndarray
    line: LineParams = field(default_factory=LineParams)

    @property
    def N(self):
        return self.frequencies.shape[0]

    def __getitem__(self, k):
        return self.frequencies[k - 1]


def mode_spacing(f, p):
    """Local mode spacing ``v/2l * (1 - (f/f_p)^2)^(3/2)`` at frequency ``f``.

    Accepts scalars or arrays.

    :raises DomainError: for ``f < 0`` or ``f >= f_p``.
    """
    f_arr = np.asarray(f, dtype=np.float64)
    if np.any(f_arr < 0) or np.any(f_arr >= p.f_p):
        raise DomainError(f"frequency must lie in [0, f_p={p.f_p}) GHz")
    out = p.spacing0 * (1.0 - (f_arr / p.f_p) ** 2) ** 1.5
    return float(out) if out.ndim == 0 else out


def dispersion(x, f_p):
    """Map the dispersionless frequency ``x`` to ``x / sqrt(1 + (x/f_p)^2)``."""
    return x / np.sqrt(1.0 + (x / f_p) ** 2)


def inverse_dispersion(f, f_p):
    """Inverse of :func:`dispersion`."""
    return f / np.sqrt(1.0 - (f / f_p) ** 2)


def bare_frequencies(p, N, jitter=None):
    """Bare mode ladder for ``k = 1..N``.

    :param jitter: optional per-mode additive offsets in GHz (length N), e.g.
        from :func:`load_jitter`; never generated randomly.
    :raises DomainError: when a mode would sit at or above the plasma cutoff,
        or at nonpositive frequency.
    """
    if N < 1:
        raise InputError("N must be >= 1")
    k = np.arange(1, N + 1, dtype=np.float64)
    x = (k + p.delta_k0) * p.spacing0
    if np.any(x <= 0):
        raise DomainError(f"delta_k0={p.delta_k0} pushes mode 1 to nonpositive frequency")
    f = dispersion(x, p.f_p)
    if jitter is not None:
        jitter = np.asarray(jitter, dtype=np.float64)
        if jitter.shape != (N,):
            raise InputError(f"jitter must have length {N}")
        f = f + jitter
    if np.any(f >= p.f_p) or np.any(f <= 0):
        raise DomainError("requested mode lies outside (0, f_p)")
    if np.any(np.diff(f) <= 0):
        raise InputError("jittered ladder is not strictly increasing")
    return BareModeSet(frequencies=f, line=p)


def load_jitter(path, N):
    """Read per-mode frequency offsets from a ``mode,df_GHz`` file; absent modes get 0."""
    out = np.zeros(N)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for lineno, row in enumerate(reader, start=2):
            try:
                k = int(row["mode"])
                out[k - 1] = float(row["df_GHz"])
            except (KeyError, ValueError, IndexError) as exc:
                raise InputError(f"{path}:{lineno}: bad jitter row {row!r}") from exc
    return out


@dataclass(frozen=True)
class QualityFactors:
    """Internal and external quality factors indexed by bare mode (``q_int[k - 1]``)."""

    q_int: np.ndarray
    q_ext: np.ndarray

    def __post_init__(self):
        for name in ("q_int", "q_ext"):
            arr = getattr(self, name)
            if np.any(np.isnan(arr)) or np.any(arr <= 0):
                raise InputError(f"{name} entries must be positive")

    @property
    def N(self):
        return self.q_int.shape[0]

    @classmethod
    def uniform(cls, N, q_int, q_ext):
        return cls(q_int=np.full(N, float(q_int)), q_ext=np.full(N, float(q_ext)))


def load_quality_factors(records, N=None):
    """Build :class:`QualityFactors` from ``(mode, Q_int, Q_ext)`` records.

    Records may be tuples or mappings with ``mode``, ``Q_int``, ``Q_ext`` keys.
    Modes missing from ``1..N`` take the values of the nearest listed mode,
    preferring the lower index on ties; each fill is logged.

    :raises InputError: on duplicate modes or nonpositive Q (naming the mode).
    """
    table = {}
    for rec in records:
        if isinstance(rec, dict):
            k, qi, qe = int(rec["mode"]), float(rec["Q_int"]), float(rec["Q_ext"])
        else:
            k, qi, qe = int(rec[0]), float(rec[1]), float(rec[2])
        if k in table:
            raise InputError(f"duplicate quality-factor record for mode {k}")
        if not (qi > 0 and qe > 0):
            raise InputError(f"mode {k}: quality factors must be positive (Q_int={qi}, Q_ext={qe})")
        table[k] = (qi, qe)
    if not table:
        raise InputError("no quality-factor records")
    known = np.array(sorted(table))
    N = int(N or known.max())
    q_int = np.empty(N)
    q_ext = np.empty(N)
    for k in range(1, N + 1):
        if k in table:
            src = k
        else:
            dist = np.abs(known - k)
            src = int(known[np.flatnonzero(dist == dist.min())[0]])
            log.warning("quality factors for mode %d missing; using mode %d", k, src)
        q_int[k - 1], q_ext[k - 1] = table[src]
    return QualityFactors(q_int=q_int, q_ext=q_ext)


def read_quality_file(path, N=None):
    """Parse a ``mode,f_GHz,Q_int,Q_ext`` file into :class:`QualityFactors`."""
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"mode", "Q_int", "Q_ext"} - set(reader.fieldnames or ())
        if missing:
            raise InputError(f"{path}: header lacks columns {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                records.append((int(row["mode"]), float(row["Q_int"]), float(row["Q_ext"])))
            except (TypeError, ValueError) as exc:
                raise InputError(f"{path}:{lineno}: malformed row {row!r}") from exc
    return load_quality_factors(records, N=N)


def write_quality_file(path, q, bare=None):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["mode", "f_GHz", "Q_int", "Q_ext"])
        for k in range(1, q.N + 1):
            f = f"{bare[k]:.9f}" if bare is not None and k <= bare.N else ""
            w.writerow([k, f, repr(float(q.q_int[k - 1])), repr(float(q.q_ext[k - 1]))])
