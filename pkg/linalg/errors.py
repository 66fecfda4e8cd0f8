"""Exception types shared across the package."""
from __future__ import annotations


class RandomizingError(Exception):
    """Base class for every error raised by this project."""


class InvalidInputError(RandomizingError, ValueError):
    """Malformed matrix, shape mismatch or non-finite entries."""


class InvalidParameterError(RandomizingError, ValueError):
    """A scalar parameter is outside its admissible range."""


class NotHermitianError(InvalidInputError):
    pass


class UnitarityViolationError(InvalidInputError):
    def __init__(self, index: int, residual: float):
        self.index = index
        self.residual = residual
        super().__init__(
            f"Kraus element {index} is not unitary: ||U^dag U - Id||_inf = {residual:.3e}"
        )


class UnsupportedCombinationError(RandomizingError, ValueError):
    pass


class ResourceLimitError(RandomizingError, ValueError):
    pass


class LemmaPreconditionError(InvalidParameterError):
    """The net radius does not satisfy 0 < delta < 1/2."""
