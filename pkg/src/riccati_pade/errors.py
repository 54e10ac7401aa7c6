"""Exception hierarchy shared by the solver modules and the CLI."""


class RPMError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(RPMError, ValueError):
    """An argument lies outside the domain of the operation."""


class InsufficientCoefficientsError(RPMError, ValueError):
    """A Hankel determinant needs more series coefficients than were supplied."""


class PrecisionExhaustedError(RPMError):
    """Escalating the working precision would exceed ``max_bits``."""


class NoConvergenceError(RPMError):
    """Root polishing hit its iteration cap or started cycling."""

    def __init__(self, message: str, dimension: int | None = None):
        super().__init__(message)
        self.dimension = dimension


class NotConvergedError(RPMError):
    """A root sequence did not certify the requested number of digits."""


class DegenerateFitError(RPMError, ValueError):
    """A slope fit received a zero difference or too few points."""
