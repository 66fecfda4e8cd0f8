"""Singular values, Schatten norms and Hermitian eigendecompositions.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Inputs are
validated once by :func:`as_matrix`; everything else is a pure function.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from linalg.errors import InvalidInputError, InvalidParameterError, NotHermitianError

EIG_TOL = 1e-9
HERM_TOL = 1e-9

Exponent = Union[int, float, str]


def as_matrix(x, square: bool = False) -> np.ndarray:
    """Return ``x`` as a finite 2-D complex128 array."""
    a = np.asarray(x, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise InvalidInputError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix has non-finite entries")
    if square and a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {a.shape}")
    return a


def singular_values(A) -> np.ndarray:
    """Singular values s_1 >= ... >= s_d >= 0."""
    a = as_matrix(A)
    return np.linalg.svd(a, compute_uv=False)


def _parse_exponent(p: Exponent) -> float:
    if isinstance(p, str):
        if p.strip().lower() in ("inf", "infinity", "oo"):
            return float("inf")
        try:
            p = float(p)
        except ValueError:
            raise InvalidParameterError(f"Schatten exponent must be a number or 'inf', got {p!r}")
    p = float(p)
    if np.isnan(p) or p < 1:
        raise InvalidParameterError(f"Schatten exponent must satisfy p >= 1, got {p}")
    return p


def schatten_norm(A, p: Exponent = 2) -> float:
    """(sum_i s_i(A)^p)^(1/p); ``p=inf`` gives the operator norm."""
    p = _parse_exponent(p)
    s = singular_values(as_matrix(A, square=True))
    if np.isinf(p):
        return float(s[0])
    if p == 1:
        return float(s.sum())
    top = s[0]
    if top == 0:
        return 0.0
    # scale first so large exponents do not overflow
    return float(top * np.sum((s / top) ** p) ** (1.0 / p))


def operator_norm(A) -> float:
    return schatten_norm(A, float("inf"))


def trace_inner(A, B) -> complex:
    """Hilbert-Schmidt inner product tr(A^dag B)."""
    a = as_matrix(A)
    b = as_matrix(B)
    if a.shape != b.shape:
        raise InvalidInputError(f"shape mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def projector(x) -> np.ndarray:
    """Rank-one projector |x><x| for a (not necessarily normalized) vector."""
    v = np.asarray(x, dtype=np.complex128).reshape(-1)
    return np.outer(v, v.conj())


def unitarity_residual(U) -> float:
    u = as_matrix(U, square=True)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def is_unitary(U, tol: float = 1e-9) -> bool:
    return unitarity_residual(U) <= tol


@dataclass(frozen=True, eq=False)
class HermitianEigenDecomposition:
    eigenvalues: np.ndarray   # non-increasing
    eigenvectors: np.ndarray  # columns aligned with eigenvalues

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def top_abs(self, tol: float = 1e-12) -> int:
        """Index of the eigenvalue of largest modulus, most positive on ties."""
        mags = np.abs(self.eigenvalues)
        peak = mags.max()
        slack = tol * max(peak, 1.0)
        candidates = np.flatnonzero(mags >= peak - slack)
        # eigenvalues are sorted non-increasing, so the first candidate is the most positive
        return int(candidates[0])


def _pivot_index(v: np.ndarray) -> int:
    mags = np.abs(v)
    return int(np.flatnonzero(mags >= mags.max() - 1e-12)[0])


def hermitian_eig(
    A,
    herm_tol: float = HERM_TOL,
    eig_tol: float = EIG_TOL,
) -> HermitianEigenDecomposition:
    """Eigendecomposition of a Hermitian matrix with deterministic ordering.

    Eigenvalues are returned non-increasing; near-degenerate eigenvalues
    (within ``eig_tol`` relative) are ordered by the index of the
    largest-magnitude component of their eigenvector, and each eigenvector is
    phased so that component is real and positive.
    """
    a = as_matrix(A, square=True)
    asym = operator_norm(a - a.conj().T)
    if asym > herm_tol * operator_norm(a):
        raise NotHermitianError(f"||A - A^dag||_inf = {asym:.3e} exceeds {herm_tol:.1e} * ||A||_inf")
    w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
    scale = max(float(np.max(np.abs(w))), 1.0)

    w = w[::-1]
    v = v[:, ::-1]

    pivots = [_pivot_index(v[:, k]) for k in range(v.shape[1])]
    slack = eig_tol * scale
    order = list(range(len(w)))
    start = 0
    while start < len(order):
        stop = start + 1
        while stop < len(order) and w[order[stop - 1]] - w[order[stop]] <= slack:
            stop += 1
        order[start:stop] = sorted(order[start:stop], key=lambda k: pivots[k])
        start = stop

    w = w[order]
    v = v[:, order]
    for k in range(v.shape[1]):
        c = v[pivots[order[k]], k]
        v[:, k] *= np.conj(c) / abs(c)
    return HermitianEigenDecomposition(eigenvalues=np.ascontiguousarray(w), eigenvectors=np.ascontiguousarray(v))
