"""Multimode cavity + fluxonium simulator: spectra, Fock-space sectors, reflection and calibration."""

from ._backend import BACKEND
from .errors import BoundaryError, DomainError, InputError, MBLCavityError, NumericalError
from .fluxonium import FluxoniumParams, QubitSolution, dipole_asym_sweep, solve_fluxonium
from .line import (BareModeSet, LineParams, QualityFactors, bare_frequencies,
                   load_quality_factors, mode_spacing)
from .hybrid import CouplingModel, SingleParticleSolution, hybridize, qubit_weight_profile
from .interaction import InteractionParams, apply_V, coupling_matrix, interaction_scale
from .states import FockState
from .fock import (FockSector, HoppingTree, ManyBodyEigensystem, assemble_hamiltonian,
                   build_tree, diagonalize_sector, enumerate_sector)
from .response import (ReflectionSpectrum, count_resonances, dressed_quality, manybody_quality,
                       s11_bare, s11_manybody)
from .calibrate import FitReport, SpectroscopyData, fit_circuit, fit_dispersion
from .params import CircuitParams

__version__ = "0.1.0"
