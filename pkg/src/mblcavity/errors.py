"""Exception types raised across the package."""


class MBLCavityError(Exception):
    """Base class for all package errors."""


class InputError(MBLCavityError, ValueError):
    """Malformed or out-of-range input (non-finite entries, bad records)."""


class DomainError(MBLCavityError, ValueError):
    """Argument outside the physical domain of a model (e.g. above the plasma cutoff)."""


class BoundaryError(MBLCavityError):
    """A fluxonium wavefunction reaches the edge of the phase grid."""


class NumericalError(MBLCavityError):
    """An iterative solver failed to converge.

    ``diagnostics`` carries whatever partial state the solver had when it gave up.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
