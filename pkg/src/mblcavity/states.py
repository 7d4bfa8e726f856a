"""Occupation-number states."""

from collections import Counter
from dataclasses import dataclass

from .errors import InputError


@dataclass(frozen=True, order=True)
class FockState:
    """Sparse occupation map stored as a sorted tuple of ``(mode, count)`` pairs."""

    occupations: tuple = ()

    def __post_init__(self):
        prev = 0
        for mode, count in self.occupations:
            if mode <= prev or count <= 0:
                raise InputError(f"invalid occupations {self.occupations!r}")
            prev = mode

    @classmethod
    def of(cls, *modes):
        """State with one photon per listed mode; repeats add photons."""
        return cls.from_counts(Counter(modes))

    @classmethod
    def from_counts(cls, counts):
        return cls(tuple(sorted((int(k), int(n)) for k, n in counts.items() if n)))

    @classmethod
    def vacuum(cls):
        return cls(())

    def as_dict(self):
        return dict(self.occupations)

    def count(self, mode):
        for k, n in self.occupations:
            if k == mode:
                return n
        return 0

    @property
    def n_particles(self):
        return sum(n for _, n in self.occupations)

    def n_high(self, j0):
        return sum(n for k, n in self.occupations if k > j0)

    def modes(self):
        """Mode labels with multiplicity, highest first, e.g. ``(35, 6)``."""
        out = []
        for k, n in reversed(self.occupations):
            out.extend([k] * n)
        return tuple(out)

    def energy(self, f):
        """Unperturbed energy for a frequency lookup ``f(k)``."""
        return sum(n * f(k) for k, n in self.occupations)

    def to_json(self):
        return {str(k): n for k, n in self.occupations}

    @classmethod
    def from_json(cls, data):
        return cls.from_counts({int(k): int(n) for k, n in data.items()})

    def __str__(self):
        return "|" + ",".join(map(str, self.modes())) + ">"
