"""Bare fluxonium spectrum on a uniform phase grid.

H/h = 4 E_C n^2 + E_L phi^2 / 2 - E_J cos(phi - phi_ext), with n^2 = -d^2/dphi^2
discretized by central differences on [-phi_max, phi_max] (hard walls).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundaryError, InputError, NumericalError
from .numerics import eigh_tridiagonal_lowest

DEFAULT_GRID = 2001
DEFAULT_PHI_MAX = 8 * math.pi
BOUNDARY_TOL = 1e-8


@dataclass(frozen=True)
class FluxoniumParams:
    E_C: float = 8.0
    E_J: float = 8.9
    E_L: float = 1.39

    def __post_init__(self):
        if not (self.E_C > 0 and self.E_L > 0):
            raise InputError("E_C and E_L must be positive")
        # E_J = 0 is the harmonic limit and stays allowed
        if not self.E_J >= 0:
            raise InputError("E_J must be nonnegative")


@dataclass(frozen=True)
class QubitSolution:
    phi_ext: float
    levels: np.ndarray
    f_eg: float
    dipole_asym: float
    grid_size: int
    phi_max: float


def _hamiltonian(p, phi_ext, grid_size, phi_max):
    phi = np.linspace(-phi_max, phi_max, grid_size)
    h = phi[1] - phi[0]
    kinetic = 4.0 * p.E_C / (h * h)
    diag = 2.0 * kinetic + 0.5 * p.E_L * phi * phi - p.E_J * np.cos(phi - phi_ext)
    off = np.full(grid_size - 1, -kinetic)
    return phi, diag, off


def solve_fluxonium(p, phi_ext, grid_size=DEFAULT_GRID, phi_max=DEFAULT_PHI_MAX, n_levels=2):
    """Lowest ``n_levels`` fluxonium levels at external flux ``phi_ext`` (radians).

    :raises InputError: if ``grid_size`` is even or < 401, ``phi_max < 4 pi``,
        or ``n_levels < 2``.
    :raises BoundaryError: if any requested level keeps amplitude above
        ``1e-8`` of its peak at the grid edge.
    """
    if grid_size < 401 or grid_size % 2 == 0:
        raise InputError("grid_size must be odd and >= 401")
    if phi_max < 4 * math.pi - 1e-12:
        raise InputError("phi_max must be at least 4 pi")
    if n_levels < 2:
        raise InputError("n_levels must be >= 2")
    phi, diag, off = _hamiltonian(p, phi_ext, grid_size, phi_max)
    es = eigh_tridiagonal_lowest(diag, off, n_levels)
    psi = es.vectors
    for lvl in range(n_levels):
        col = np.abs(psi[:, lvl])
        edge = max(col[0], col[-1])
        if edge > BOUNDARY_TOL * col.max():
            raise BoundaryError(
                f"level {lvl} leaks to the grid edge (edge/peak = {edge / col.max():.2e}); "
                f"increase phi_max beyond {phi_max:.3f}"
            )
    levels = np.asarray(es.values, dtype=np.float64)
    if np.any(np.diff(levels) <= 0):
        raise NumericalError("fluxonium levels are not strictly increasing")
    dipole = float(np.dot(phi, psi[:, 1] ** 2) - np.dot(phi, psi[:, 0] ** 2))
    return QubitSolution(phi_ext=float(phi_ext), levels=levels, f_eg=float(levels[1] - levels[0]),
                         dipole_asym=dipole, grid_size=grid_size, phi_max=float(phi_max))


def dipole_asym_sweep(p, phi_ext_list, **kwargs):
    """``[(phi_ext, <e|phi|e> - <g|phi|g>), ...]`` over a flux list."""
    return [(float(phi), solve_fluxonium(p, phi, **kwargs).dipole_asym) for phi in phi_ext_list]
