"""Exception types shared across the package."""


class SespinError(Exception):
    """Base class for all package errors."""


class ValidationError(SespinError, ValueError):
    """Input violates a documented precondition or invariant."""


class IncompatibleUnitsError(SespinError, ValueError):
    """Conversion or arithmetic attempted between incompatible units."""


class DataError(SespinError, ValueError):
    """Measured input data is malformed or unusable."""


class BoundsError(ValidationError):
    """Requested region lies outside the data range."""


class FitError(SespinError):
    """Base class for fit failures."""


class NonFiniteResidualError(FitError):
    """Residual became non-finite during iteration.

    Carries the last parameter vector at which the residual was still finite.
    """

    def __init__(self, message, last_params=None):
        super().__init__(message)
        self.last_params = last_params


class RankDeficientError(FitError):
    """Normal matrix is singular; the data cannot constrain all parameters."""


class FitDegenerateError(FitError):
    """Fit converged to a physically meaningless solution."""


class UnphysicalEfficiencyError(ValidationError):
    """Efficiency would exceed one."""


class ClassificationError(ValidationError):
    """Operation requires a feature classification the track does not have."""
