"""Uniform-weight Kraus channels Phi(X) = (1/N) sum_i U_i X U_i^dag.

A channel keeps its elements stacked in one read-only ``(N, d, d)`` array.
The weight 1/N is implied and never folded into the stored matrices.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from linalg.core import as_matrix, operator_norm, unitarity_residual
from linalg.errors import InvalidInputError, UnitarityViolationError

UNITARY_TOL = 1e-9
RANK_TOL = 1e-8
STATE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class KrausChannel:
    operators: np.ndarray
    certified: bool = True

    @property
    def dim(self) -> int:
        return int(self.operators.shape[1])

    @property
    def n(self) -> int:
        return int(self.operators.shape[0])

    @property
    def unitaries(self) -> np.ndarray:
        return self.operators

    def __repr__(self) -> str:
        return f"KrausChannel(dim={self.dim}, n={self.n}, certified={self.certified})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    dim: int
    matrix: np.ndarray


def _stack(operators: Iterable) -> np.ndarray:
    mats = [as_matrix(op, square=True) for op in operators]
    if not mats:
        raise InvalidInputError("a channel needs at least one Kraus element")
    d = mats[0].shape[0]
    for i, m in enumerate(mats):
        if m.shape != (d, d):
            raise InvalidInputError(f"Kraus element {i} has shape {m.shape}, expected {(d, d)}")
    stacked = np.ascontiguousarray(np.stack(mats))
    stacked.setflags(write=False)
    return stacked


def make_uniform_channel(unitaries: Iterable, tol: float = UNITARY_TOL) -> KrausChannel:
    """Channel averaging conjugation by each unitary with weight 1/N."""
    ops = _stack(unitaries)
    eye = np.eye(ops.shape[1])
    residuals = np.max(np.abs(np.conj(np.swapaxes(ops, 1, 2)) @ ops - eye), axis=(1, 2))
    bad = np.flatnonzero(residuals > tol)
    if bad.size:
        raise UnitarityViolationError(int(bad[0]), float(residuals[bad[0]]))
    return KrausChannel(operators=ops, certified=True)


def make_kraus_channel(operators: Iterable) -> KrausChannel:
    """Relaxed constructor: no unitarity check, flagged non-certified."""
    return KrausChannel(operators=_stack(operators), certified=False)


def _check_operand(channel: KrausChannel, X) -> np.ndarray:
    x = as_matrix(X, square=True)
    if x.shape[0] != channel.dim:
        raise InvalidInputError(f"operand is {x.shape[0]}x{x.shape[0]}, channel acts on d={channel.dim}")
    return x


def apply(channel: KrausChannel, X) -> np.ndarray:
    x = _check_operand(channel, X)
    U = channel.operators
    return np.mean(U @ x @ np.conj(np.swapaxes(U, 1, 2)), axis=0)


def apply_adjoint(channel: KrausChannel, X) -> np.ndarray:
    """Phi^*(X) = (1/N) sum_i U_i^dag X U_i."""
    x = _check_operand(channel, X)
    U = channel.operators
    return np.mean(np.conj(np.swapaxes(U, 1, 2)) @ x @ U, axis=0)


def apply_R(X) -> np.ndarray:
    """Completely randomizing channel X -> tr(X) Id/d."""
    x = as_matrix(X, square=True)
    d = x.shape[0]
    return np.trace(x) * np.eye(d, dtype=np.complex128) / d


def choi(channel: KrausChannel) -> np.ndarray:
    """Choi matrix sum_ij E_ij (x) Phi(E_ij), row index i*d + a."""
    U = channel.operators
    n, d, _ = U.shape
    # row (i, a) of the vectorized element is U[a, i]
    V = np.swapaxes(U, 1, 2).reshape(n, d * d)
    return (V.T @ V.conj()) / n


def kraus_rank(channel: KrausChannel, rank_tol: float = RANK_TOL) -> int:
    w = np.linalg.eigvalsh(choi(channel))
    top = float(w.max())
    if top <= 0:
        return 0
    return int(np.count_nonzero(w > rank_tol * top))


def is_trace_preserving(channel: KrausChannel, tol: float = UNITARY_TOL) -> Tuple[bool, float]:
    """Returns (ok, ||(1/N) sum_i U_i^dag U_i - Id||_inf)."""
    U = channel.operators
    gram = np.mean(np.conj(np.swapaxes(U, 1, 2)) @ U, axis=0)
    residual = operator_norm(gram - np.eye(channel.dim))
    return residual <= tol, residual


def is_completely_positive(channel: KrausChannel, tol: float = STATE_TOL) -> Tuple[bool, float]:
    """Returns (ok, smallest Choi eigenvalue)."""
    w = np.linalg.eigvalsh(choi(channel))
    lowest = float(w.min())
    return lowest >= -tol * max(1.0, float(np.abs(w).max())), lowest


def is_unital(channel: KrausChannel, tol: float = UNITARY_TOL) -> bool:
    eye = np.eye(channel.dim, dtype=np.complex128)
    return operator_norm(apply(channel, eye) - eye) <= tol


def density_matrix(X, tol: float = STATE_TOL) -> DensityMatrix:
    """Validate a state: Hermitian, unit trace and positive semi-definite."""
    x = as_matrix(X, square=True)
    asym = float(np.max(np.abs(x - x.conj().T)))
    if asym > tol:
        raise InvalidInputError(f"state is not Hermitian (asymmetry {asym:.3e})")
    tr = np.trace(x)
    if abs(tr - 1.0) > tol:
        raise InvalidInputError(f"state trace is {tr.real:.6g}, expected 1")
    lowest = float(np.linalg.eigvalsh(0.5 * (x + x.conj().T)).min())
    if lowest < -tol:
        raise InvalidInputError(f"state has negative eigenvalue {lowest:.3e}")
    return DensityMatrix(dim=x.shape[0], matrix=x)


def random_density_matrix(d: int, rng: np.random.Generator) -> DensityMatrix:
    """Full-rank mixed state G G^dag / tr(G G^dag) from a complex Ginibre G."""
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    rho = rho / np.trace(rho).real
    return density_matrix(0.5 * (rho + rho.conj().T))
