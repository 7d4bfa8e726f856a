"""Run configuration: YAML in, validated dataclasses, YAML out."""

import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np
import yaml

from .errors import InputError
from .params import CircuitParams


@dataclass(frozen=True)
class SweepSpec:
    """Flux points in units of 2 pi: an explicit list, or start/stop/step inclusive."""

    phi: tuple = ()
    start: float = 0.356
    stop: float = 0.356
    step: float = 0.01

    def points(self):
        if self.phi:
            return tuple(float(x) for x in self.phi)
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return tuple(round(self.start + i * self.step, 12) for i in range(n))

    def validate(self):
        if not self.phi:
            if not (self.step > 0 and self.stop >= self.start):
                raise InputError("sweep needs step > 0 and stop >= start")
        if not all(math.isfinite(x) for x in self.points()):
            raise InputError("flux points must be finite")


@dataclass(frozen=True)
class ProbeSpec:
    modes: tuple = (37,)
    max_particles: int = 2
    window_spacings: float = 4.0
    step_GHz: float = 2e-6
    fluxmap_step_GHz: float = 1e-4
    tree_max_particles: int = 3

    def validate(self, params):
        if not self.modes:
            raise InputError("probe mode list is empty")
        for k in self.modes:
            if not params.j0 < int(k) <= params.N + 1:
                raise InputError(f"probe mode {k} must satisfy j0 < k <= N + 1 ({params.j0} < k <= {params.N + 1})")
        for n in (self.max_particles, self.tree_max_particles):
            if n not in (1, 2, 3):
                raise InputError("max_particles must be 1, 2 or 3")
        if not (self.window_spacings > 0 and self.step_GHz > 0 and self.fluxmap_step_GHz > 0):
            raise InputError("window and grid steps must be positive")


@dataclass(frozen=True)
class InputSpec:
    quality_file: str = None
    jitter_file: str = None
    spectroscopy_files: tuple = ()


@dataclass(frozen=True)
class FitSpec:
    dispersion_start: tuple = (2.3e6, 25.0)
    circuit_start: tuple = None
    use_fitted_line: bool = True
    tol: float = 1e-9
    max_iter: int = 3000


_SECTIONS = {"sweep": SweepSpec, "probe": ProbeSpec, "inputs": InputSpec, "fit": FitSpec}
_TUPLES = {"phi", "modes", "spectroscopy_files", "dispersion_start", "circuit_start"}


@dataclass(frozen=True)
class RunConfig:
    circuit: CircuitParams = field(default_factory=CircuitParams)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    probe: ProbeSpec = field(default_factory=ProbeSpec)
    inputs: InputSpec = field(default_factory=InputSpec)
    fit: FitSpec = field(default_factory=FitSpec)
    output: str = "out"
    workers: int = 1

    def validate(self):
        self.sweep.validate()
        self.probe.validate(self.circuit)
        if self.workers < 1:
            raise InputError("workers must be >= 1")
        return self

    def to_dict(self):
        out = {"circuit": self.circuit.to_dict()}
        for name in _SECTIONS:
            out[name] = {k: (list(v) if isinstance(v, tuple) else v)
                         for k, v in asdict(getattr(self, name)).items()}
        out["output"] = self.output
        out["workers"] = self.workers
        return out

    @classmethod
    def from_dict(cls, data):
        data = dict(data or {})
        unknown = set(data) - {"circuit", "output", "workers", *_SECTIONS}
        if unknown:
            raise InputError(f"unknown config sections: {sorted(unknown)}")
        kwargs = {"circuit": CircuitParams.from_dict(_coerce_circuit(data.get("circuit") or {}))}
        for name, typ in _SECTIONS.items():
            sec = dict(data.get(name) or {})
            allowed = {f.name for f in fields(typ)}
            bad = set(sec) - allowed
            if bad:
                raise InputError(f"unknown keys in [{name}]: {sorted(bad)}")
            for key in _TUPLES & set(sec):
                if sec[key] is not None:
                    sec[key] = tuple(sec[key])
            kwargs[name] = typ(**sec)
        if "output" in data:
            kwargs["output"] = str(data["output"])
        if "workers" in data:
            kwargs["workers"] = int(data["workers"])
        return cls(**kwargs)

    def replace(self, **changes):
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d.update(changes)
        return RunConfig(**d)

    def dump(self):
        return yaml.safe_dump(self.to_dict(), sort_keys=True)


def _coerce_circuit(sec):
    ints = {"j0", "N"}
    out = {}
    for k, v in sec.items():
        if k in ints:
            out[k] = int(v)
        elif k == "lamb_compensation":
            out[k] = bool(v)
        else:
            out[k] = float(v)
    return out


def load_config(path=None):
    if path is None:
        return RunConfig()
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise InputError(f"{path}: invalid YAML: {exc}") from exc
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    if data is not None and not isinstance(data, dict):
        raise InputError(f"{path}: top level must be a mapping")
    return RunConfig.from_dict(data)


def phi_label(phi):
    return f"{phi:.6f}"


def as_float_tuple(values):
    return tuple(float(x) for x in np.atleast_1d(values))
