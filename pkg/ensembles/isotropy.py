"""Isotropy checks on second moments E U_ij conj(U_kl) = delta_ik delta_jl / d."""
from __future__ import annotations

from typing import Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from ensembles.families import UnitaryEnsemble
from linalg.core import as_matrix
from linalg.errors import (
    InvalidInputError,
    InvalidParameterError,
    ResourceLimitError,
    UnsupportedCombinationError,
)

EXACT_MAX_DIM = 16
MIN_SAMPLES = 100
SAMPLE_BATCH = 4096


class IsotropyReport(BaseModel):
    dim: int
    ensemble: str
    mode: Literal["exact", "sampled"]
    max_deviation: float
    worst_tuple: Tuple[int, int, int, int]
    sample_count: Optional[int] = None
    standard_error: Optional[float] = None


def second_moment_matrix(e: UnitaryEnsemble) -> np.ndarray:
    """d^2 x d^2 matrix with entry [(i,j),(k,l)] = sum_m p_m U_ij conj(U_kl)."""
    if not e.is_discrete:
        raise UnsupportedCombinationError("exact moments need a discrete ensemble")
    d = e.dim
    V = e.matrices.reshape(e.size, d * d)
    return (V.T * e.probabilities) @ V.conj()


def _report(moments: np.ndarray, e: UnitaryEnsemble, mode: str, **extra) -> IsotropyReport:
    d = e.dim
    dev = np.abs(moments - np.eye(d * d) / d)
    flat = int(np.argmax(dev))
    row, col = divmod(flat, d * d)
    i, j = divmod(row, d)
    k, l = divmod(col, d)
    return IsotropyReport(
        dim=d,
        ensemble=e.name,
        mode=mode,
        max_deviation=float(dev.max()),
        worst_tuple=(i, j, k, l),
        **extra,
    )


def check_isotropy_exact(e: UnitaryEnsemble) -> IsotropyReport:
    if not e.is_discrete:
        raise UnsupportedCombinationError("exact isotropy is only defined for discrete ensembles")
    if e.dim > EXACT_MAX_DIM:
        raise ResourceLimitError(
            f"exact isotropy is capped at d={EXACT_MAX_DIM}; use the sampled check for d={e.dim}"
        )
    return _report(second_moment_matrix(e), e, "exact")


def check_isotropy_sampled(
    e: UnitaryEnsemble,
    samples: int,
    rng: np.random.Generator,
    batch: int = SAMPLE_BATCH,
) -> IsotropyReport:
    """Monte Carlo moment matrix; ``standard_error`` is the 1/sqrt(samples) scale."""
    if samples < MIN_SAMPLES:
        raise InvalidParameterError(f"sampled isotropy needs at least {MIN_SAMPLES} samples, got {samples}")
    d = e.dim
    acc = np.zeros((d * d, d * d), dtype=np.complex128)
    done = 0
    while done < samples:
        take = min(batch, samples - done)
        V = e.sample(take, rng).reshape(take, d * d)
        acc += V.T @ V.conj()
        done += take
    return _report(
        acc / samples,
        e,
        "sampled",
        sample_count=samples,
        standard_error=1.0 / np.sqrt(samples),
    )


def trace_moment(e: UnitaryEnsemble, X) -> Tuple[float, float]:
    """(E |tr U X^dag|^2, ||X||_2^2 / d); equal for isotropic ensembles."""
    x = as_matrix(X, square=True)
    if x.shape[0] != e.dim:
        raise InvalidInputError(f"X is {x.shape[0]}x{x.shape[0]}, ensemble acts on d={e.dim}")
    if not e.is_discrete:
        raise UnsupportedCombinationError("trace moments are computed exactly for discrete ensembles")
    V = e.matrices.reshape(e.size, -1)
    lhs = float(np.sum(e.probabilities * np.abs(V @ x.reshape(-1).conj()) ** 2))
    rhs = float(np.sum(np.abs(x) ** 2) / e.dim)
    return lhs, rhs


def gram_matrix(family: Sequence) -> np.ndarray:
    """Gram matrix G[a, b] = tr(F_a^dag F_b)."""
    mats = [as_matrix(m, square=True) for m in family]
    if len({m.shape for m in mats}) > 1:
        raise InvalidInputError("family members must share one dimension")
    F = np.stack(mats).reshape(len(mats), -1)
    return F.conj() @ F.T


def mutually_orthogonal_check(family: Sequence, tol: float = 1e-9) -> bool:
    G = gram_matrix(family)
    off = G - np.diag(np.diag(G))
    return bool(np.max(np.abs(off), initial=0.0) <= tol)
