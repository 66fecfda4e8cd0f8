from channels.kraus import (
    DensityMatrix,
    KrausChannel,
    apply,
    apply_adjoint,
    apply_R,
    choi,
    density_matrix,
    is_completely_positive,
    is_trace_preserving,
    is_unital,
    kraus_rank,
    make_kraus_channel,
    make_uniform_channel,
    random_density_matrix,
)

__all__ = [
    "DensityMatrix",
    "KrausChannel",
    "apply",
    "apply_adjoint",
    "apply_R",
    "choi",
    "density_matrix",
    "is_completely_positive",
    "is_trace_preserving",
    "is_unital",
    "kraus_rank",
    "make_kraus_channel",
    "make_uniform_channel",
    "random_density_matrix",
]
