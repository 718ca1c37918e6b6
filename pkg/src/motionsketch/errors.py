"""Exception types shared across the package."""


class MotionSketchError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(MotionSketchError, ValueError):
    """An argument is outside its mathematical domain (e.g. t not in [0, 1])."""


class CapacityError(MotionSketchError, ValueError):
    """A degree or size exceeds the configured maximum."""


class DegenerateInputError(MotionSketchError, ValueError):
    """Structurally degenerate input (duplicate nodes, all-zero map, ...)."""


class ConditioningError(MotionSketchError, ValueError):
    """A linear system is singular or too ill-conditioned to solve reliably."""

    def __init__(self, message: str, condition: float | None = None):
        super().__init__(message)
        self.condition = condition


class ValidationError(MotionSketchError, ValueError):
    """Input data violates a documented structural invariant."""


class ParseError(MotionSketchError, ValueError):
    """A file could not be parsed; the message carries location context."""


class UnsupportedVersionError(ParseError):
    """A model file declares a format version newer than this library."""


class DivergenceError(MotionSketchError, RuntimeError):
    """Optimization produced a non-finite loss or gradient."""

    def __init__(self, message: str, iteration: int | None = None):
        super().__init__(message)
        self.iteration = iteration
