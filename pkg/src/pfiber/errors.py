"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """Argument outside the set where the quantity is defined."""


class PoleError(ZeroDivisionError):
    """Evaluation hit a pole (for instance ``T = 0``)."""


class SingularError(ArithmeticError):
    """The reduced 3x3 system is singular: ``z`` is an eigenvalue."""


class SolverError(RuntimeError):
    """Root search failed; ``diagnostics`` holds what was seen."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ContractError(ValueError):
    """Inputs live on incompatible grids or violate a structural contract."""


class AccuracyWarning(RuntimeWarning):
    """A quadrature or resolvent evaluation did not reach its tolerance."""
