"""Dense complex linear algebra used by every other package."""
from linalg.core import (
    HermitianEigenDecomposition,
    as_matrix,
    hermitian_eig,
    is_unitary,
    operator_norm,
    projector,
    schatten_norm,
    singular_values,
    trace_inner,
    unitarity_residual,
)
from linalg.errors import (
    InvalidInputError,
    InvalidParameterError,
    LemmaPreconditionError,
    NotHermitianError,
    RandomizingError,
    ResourceLimitError,
    UnitarityViolationError,
    UnsupportedCombinationError,
)

__all__ = [
    "HermitianEigenDecomposition",
    "as_matrix",
    "hermitian_eig",
    "is_unitary",
    "operator_norm",
    "projector",
    "schatten_norm",
    "singular_values",
    "trace_inner",
    "unitarity_residual",
    "InvalidInputError",
    "InvalidParameterError",
    "LemmaPreconditionError",
    "NotHermitianError",
    "RandomizingError",
    "ResourceLimitError",
    "UnitarityViolationError",
    "UnsupportedCombinationError",
]
