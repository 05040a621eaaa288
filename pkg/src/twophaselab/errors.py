"""Exception types shared across the package."""


class TwoPhaseError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(TwoPhaseError, ValueError):
    """Constitutive or boundary data violates a construction invariant."""


class ConfigError(TwoPhaseError, ValueError):
    """Configuration document is malformed, incomplete, or has unknown keys."""


class RegimeError(TwoPhaseError, ValueError):
    """Operation invoked in a flow regime it does not support."""


class StructuralError(TwoPhaseError, RuntimeError):
    """Computed eigenvalue sign pattern contradicts the Mach classification.

    Flags a parameter set outside the regime table the solvers rely on.
    """


class NoProfileError(TwoPhaseError, RuntimeError):
    """Shooting failed to produce an admissible stationary profile.

    Carries the final boundary mismatch so callers can distinguish
    slow convergence from a structurally unreachable boundary datum.
    """

    def __init__(self, message, mismatch=None, iterations=None):
        super().__init__(message)
        self.mismatch = mismatch
        self.iterations = iterations


class BlowUpError(TwoPhaseError, RuntimeError):
    """Time integration lost positivity or produced non-finite values."""

    def __init__(self, message, time=None, diagnostics=None):
        super().__init__(message)
        self.time = time
        self.diagnostics = diagnostics or {}


class GridMismatchError(TwoPhaseError, ValueError):
    """Two grid-sampled objects do not share the same abscissae."""


class InsufficientDataError(TwoPhaseError, ValueError):
    """A fit window contains too few usable points."""
