"""Exception types shared across the package."""


class AdmissibilityError(ValueError):
    """A parameter function or truncation setting violates an existence condition.

    Raised when the Hurst function leaves (1/2, 1), when the truncation
    bound sup h < (1+2N)/(2N+d) fails for an unregularized computation, or
    when an integral diverges for the requested parameters.
    """


class NumericalError(RuntimeError):
    """A quadrature or matrix factorization failed to reach its tolerance."""
