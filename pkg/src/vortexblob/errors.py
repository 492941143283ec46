"""Exception types shared across the package."""


class VortexBlobError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(VortexBlobError):
    """Invalid static configuration (unsupported order, bad grid, ...)."""


class DomainError(VortexBlobError):
    """Function argument outside its mathematical domain."""


class PairDegeneracyError(VortexBlobError):
    """Two strength-bearing vortices exactly coincide.

    Carries the offending pair so callers can report which vortices
    collided instead of silently skipping the interaction.
    """

    def __init__(self, i, j, message=None):
        self.i = int(i)
        self.j = int(j)
        super().__init__(message or f"vortices {i} and {j} coincide with nonzero strengths")


class SolverFailureError(VortexBlobError):
    """Fixed-point iteration failed to converge within the iteration cap."""

    def __init__(self, iterations, residual, last_state=None, message=None):
        self.iterations = int(iterations)
        self.residual = float(residual)
        self.last_state = last_state
        super().__init__(
            message
            or f"fixed-point solver did not converge: {iterations} iterations, "
            f"residual {residual:.3e}"
        )
