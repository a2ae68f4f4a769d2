"""Exception hierarchy."""

from .scalars import NonRationalError


class NcPhaseError(Exception):
    """Base class for package errors."""


class ConfigurationError(NcPhaseError, ValueError):
    """Input parameters violate a stated precondition."""


class BackendMismatchError(NcPhaseError, TypeError):
    pass


class SingularTransformError(NcPhaseError, ValueError):
    pass


class NonFiniteError(NcPhaseError, ArithmeticError):
    pass


class UnsupportedProductError(NcPhaseError, TypeError):
    """Star product of two non-polynomial functions."""


class DegenerateHamiltonianError(NcPhaseError, ValueError):
    """The Hamiltonian has k = 0 (or k <= 0 where positivity is required)."""


class CausticError(NcPhaseError, ArithmeticError):
    """cos(k t / hbar) vanishes: the closed-form exponential is singular."""

    def __init__(self, message, k=None, label="k"):
        super().__init__(message)
        self.k = k
        self.label = label


class UnstablePotentialError(ConfigurationError):
    pass


class BranchSelectionError(NcPhaseError, RuntimeError):
    pass


__all__ = [
    "NcPhaseError",
    "ConfigurationError",
    "BackendMismatchError",
    "SingularTransformError",
    "NonFiniteError",
    "UnsupportedProductError",
    "DegenerateHamiltonianError",
    "CausticError",
    "UnstablePotentialError",
    "BranchSelectionError",
    "NonRationalError",
]
