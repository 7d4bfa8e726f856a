"""Forward model: circuit parameters and flux to spectra, sectors and trees."""

import math
from dataclasses import dataclass

import numpy as np

from .fock import (DEFAULT_WINDOW_SPACINGS, assemble_hamiltonian, build_tree,
                   diagonalize_sector, enumerate_sector)
from .fluxonium import solve_fluxonium
from .hybrid import hybridize
from .interaction import build_interaction
from .line import QualityFactors, bare_frequencies, mode_spacing
from .response import (count_resonances, dressed_quality, frequency_grid,
                       manybody_quality, s11_manybody, DEFAULT_STEP)

# used when no quality-factor file is supplied
DEFAULT_Q_INT = 1.5e4
DEFAULT_Q_EXT = 3.0e4


@dataclass(frozen=True)
class SingleParticleStage:
    params: object
    qubit: object
    bare: object
    sp: object


def single_particle(params, phi_over_2pi, jitter=None, **grid):
    """Fluxonium and dressed ladder at flux ``phi_over_2pi`` (units of 2 pi)."""
    qubit = solve_fluxonium(params.fluxonium(), 2.0 * math.pi * phi_over_2pi, **grid)
    bare = bare_frequencies(params.line(), params.N + 1, jitter=jitter)
    sp = hybridize(qubit, bare, params.coupling())
    return SingleParticleStage(params=params, qubit=qubit, bare=bare, sp=sp)


@dataclass(frozen=True)
class ProbeResult:
    stage: SingleParticleStage
    interaction: object
    sector: object
    hamiltonian: np.ndarray
    eigensystem: object
    spectrum: object

    @property
    def n_resonances(self):
        return count_resonances(self.spectrum)


def default_quality(params):
    return QualityFactors.uniform(params.N + 1, DEFAULT_Q_INT, DEFAULT_Q_EXT)


def probe_mode(params, phi_over_2pi, probe_k, max_particles=2,
               window_spacings=DEFAULT_WINDOW_SPACINGS, quality=None, stage=None,
               step=DEFAULT_STEP, with_spectrum=True):
    """Many-body sector, eigensystem and reflection around dressed mode ``probe_k``.

    The spectrum spans half a local mode spacing either side of ``f_probe``.
    """
    stage = stage or single_particle(params, phi_over_2pi)
    sp, line = stage.sp, params.line()
    ip = build_interaction(stage.qubit, sp, line, params.Gamma)
    spacing = mode_spacing(sp.f(probe_k), line)
    sector = enumerate_sector(probe_k, sp, max_particles=max_particles,
                              energy_window=window_spacings * spacing)
    h = assemble_hamiltonian(sector, ip)
    es = diagonalize_sector(h, sector)
    spectrum = None
    if with_spectrum:
        q = quality or default_quality(params)
        dq = dressed_quality(sp, q)
        grid = frequency_grid(sp.f(probe_k), 0.5 * spacing, step)
        spectrum = s11_manybody(grid, [es], [manybody_quality(es, dq)])
    return ProbeResult(stage=stage, interaction=ip, sector=sector, hamiltonian=h,
                       eigensystem=es, spectrum=spectrum)


def probe_tree(params, phi_over_2pi, probe_k, max_particles=3,
               window_spacings=DEFAULT_WINDOW_SPACINGS, stage=None):
    """Hopping tree around ``probe_k`` without diagonalizing the sector."""
    stage = stage or single_particle(params, phi_over_2pi)
    sp, line = stage.sp, params.line()
    ip = build_interaction(stage.qubit, sp, line, params.Gamma)
    sector = enumerate_sector(probe_k, sp, max_particles=max_particles,
                              energy_window=window_spacings * mode_spacing(sp.f(probe_k), line))
    h = assemble_hamiltonian(sector, ip)
    return build_tree(sector, h), sector, h
