from ensembles.families import (
    PAULI,
    UnitaryEnsemble,
    clock_operator,
    discrete_ensemble,
    fourier_basis_vector,
    fourier_ensemble,
    fourier_weyl_family,
    haar_ensemble,
    pauli_tensor_ensemble,
    resolve_ensemble,
    shift_operator,
    tensor_ensembles,
)
from ensembles.haar import sample_haar, sample_haar_batch
from ensembles.isotropy import (
    IsotropyReport,
    check_isotropy_exact,
    check_isotropy_sampled,
    gram_matrix,
    mutually_orthogonal_check,
    second_moment_matrix,
    trace_moment,
)
from ensembles.rng import stream
