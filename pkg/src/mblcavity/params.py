"""Canonical device parameters and their split into per-module records."""

from dataclasses import asdict, dataclass, fields

from .errors import InputError
from .fluxonium import FluxoniumParams
from .hybrid import CouplingModel
from .line import LineParams

# fitted device values; energies and frequencies in GHz, v in m/s, ell in m, Z_inf in kOhm
REFERENCE_VALUES = dict(E_C=8.0, E_J=8.9, E_L=1.39, v=2.36e6, ell=6e-3, f_p=26.94, Z_inf=8.97)
# one-sigma uncertainties quoted with the fitted values
REFERENCE_UNCERTAINTY = dict(E_C=0.4, E_J=0.6, E_L=0.05, v=0.01e6, f_p=0.17, Z_inf=0.67)


@dataclass(frozen=True)
class CircuitParams:
    E_C: float = 8.0
    E_J: float = 8.9
    E_L: float = 1.39
    v: float = 2.36e6
    ell: float = 6e-3
    f_p: float = 26.94
    Z_inf: float = 8.97
    Gamma: float = 1.0
    j0: int = 20
    N: int = 200
    delta_k0: float = 0.0
    lamb_compensation: bool = True

    def __post_init__(self):
        # build the sub-records once so every invariant is checked up front
        self.fluxonium()
        self.line()
        self.coupling()

    def fluxonium(self):
        return FluxoniumParams(E_C=self.E_C, E_J=self.E_J, E_L=self.E_L)

    def line(self):
        return LineParams(v=self.v, ell=self.ell, f_p=self.f_p, Z_inf=self.Z_inf,
                          delta_k0=self.delta_k0)

    def coupling(self):
        return CouplingModel(Gamma=self.Gamma, j0=self.j0, N=self.N,
                             lamb_compensation=self.lamb_compensation)

    def replace(self, **changes):
        data = asdict(self)
        unknown = set(changes) - set(data)
        if unknown:
            raise InputError(f"unknown circuit parameters: {sorted(unknown)}")
        data.update(changes)
        return CircuitParams(**data)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise InputError(f"unknown circuit parameters: {sorted(unknown)}")
        return cls(**data)
