"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """An input violates a documented precondition."""


class PreconditionError(InvalidInputError):
    """A computed gate (criticality, rank, connectivity) failed before the main computation."""


class UnsupportedSizeError(InvalidInputError):
    """A dense computation would exceed the supported problem size."""


class NumericalFailureError(RuntimeError):
    """An iterative routine produced non-finite values.

    Carries the last finite iterate for post-mortem inspection.
    """

    def __init__(self, message: str, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class RetryExhaustedError(RuntimeError):
    """A randomized construction failed its validity check on every attempt."""
