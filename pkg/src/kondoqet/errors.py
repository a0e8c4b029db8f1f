"""Exception hierarchy."""


class KondoQetError(Exception):
    """Base class for all package errors."""


class StructuralError(KondoQetError, ValueError):
    """Malformed input: bad site index, invalid parameters, wrong shape."""


class NumericalConsistencyError(KondoQetError, ArithmeticError):
    """A quantity that must be real (or Hermitian) picked up a residue."""


class DegenerateModelError(KondoQetError, ValueError):
    """The model leaves a required site without any coupling."""


class SolverError(KondoQetError, RuntimeError):
    """Iterative eigensolver failed to converge."""

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class ImpossibleOutcomeError(KondoQetError, ValueError):
    """Requested a measurement branch with (numerically) zero probability."""


class UndefinedAngleError(KondoQetError, ValueError):
    """Rotation angle requested for xi = eta = 0."""


class DomainError(KondoQetError, ValueError):
    """Argument outside the mathematical domain of a formula."""


class CapabilityError(KondoQetError, ValueError):
    """Problem too large for the dense code path."""
