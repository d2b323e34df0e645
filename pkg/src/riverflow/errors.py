"""Exception types shared across the package."""


class RiverflowError(Exception):
    """Base class for all riverflow-specific errors."""


class ShapeMismatchError(RiverflowError, ValueError):
    """Two fields or arrays that must share a grid/shape do not."""


class CorruptFileError(RiverflowError, OSError):
    """A field or container file failed header/payload validation."""


class ConvergenceError(RiverflowError, RuntimeError):
    """The steady-state iteration did not reach the residual tolerance.

    Carries the final residual and step count for diagnostics.
    """

    def __init__(self, message, residual=None, steps=None):
        super().__init__(message)
        self.residual = residual
        self.steps = steps


class NumericalBlowupError(RiverflowError, RuntimeError):
    """A non-finite value appeared in the solution state."""


class DryDomainError(RiverflowError, RuntimeError):
    """No wet cells remain (or ever existed) in the domain."""


class StaleTapeError(RiverflowError, RuntimeError):
    """A backward tape was used more than once."""


class CheckpointError(RiverflowError, RuntimeError):
    """A checkpoint or ensemble container failed integrity checks."""
