"""Unitary ensembles: Haar measure and finite families with probabilities.

Finite families are the Fourier-Weyl operators B^j A^k, tensor powers of
the Pauli matrices, their tensor products and any custom list loaded from
JSON. All of them are immutable once built.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Optional, Sequence

import numpy as np

from ensembles.haar import sample_haar_batch
from linalg.core import as_matrix
from linalg.errors import (
    InvalidInputError,
    InvalidParameterError,
    ResourceLimitError,
    UnitarityViolationError,
    UnsupportedCombinationError,
)

PROB_TOL = 1e-12
UNITARY_TOL = 1e-9
MAX_DIM = 64

PAULI = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=np.complex128,
)


@dataclass(frozen=True, eq=False)
class UnitaryEnsemble:
    dim: int
    kind: str  # "haar" or "discrete"
    matrices: Optional[np.ndarray] = None
    probabilities: Optional[np.ndarray] = None
    name: str = ""

    @property
    def is_discrete(self) -> bool:
        return self.kind == "discrete"

    @property
    def size(self) -> int:
        return 0 if self.matrices is None else int(self.matrices.shape[0])

    @property
    def is_uniform(self) -> bool:
        if not self.is_discrete:
            return False
        return bool(np.allclose(self.probabilities, 1.0 / self.size, rtol=0.0, atol=PROB_TOL))

    def family(self) -> np.ndarray:
        """The complete finite family, shape (size, d, d)."""
        if not self.is_discrete:
            raise UnsupportedCombinationError(f"ensemble '{self.name}' is continuous and has no finite family")
        return self.matrices

    def sample_indices(self, count: int, rng: np.random.Generator) -> np.ndarray:
        if not self.is_discrete:
            raise UnsupportedCombinationError("index draws need a discrete ensemble")
        return rng.choice(self.size, size=count, p=self.probabilities)

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """``count`` i.i.d. draws, shape (count, d, d)."""
        if self.is_discrete:
            return self.matrices[self.sample_indices(count, rng)]
        return sample_haar_batch(self.dim, count, rng)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def haar_ensemble(d: int) -> UnitaryEnsemble:
    if d < 1:
        raise InvalidParameterError(f"dimension must be >= 1, got {d}")
    return UnitaryEnsemble(dim=d, kind="haar", name="haar")


def discrete_ensemble(
    matrices: Iterable,
    probabilities: Optional[Sequence[float]] = None,
    name: str = "custom",
    tol: float = UNITARY_TOL,
) -> UnitaryEnsemble:
    mats = [as_matrix(m, square=True) for m in matrices]
    if not mats:
        raise InvalidInputError("a discrete ensemble needs at least one matrix")
    d = mats[0].shape[0]
    for i, m in enumerate(mats):
        if m.shape != (d, d):
            raise InvalidInputError(f"matrix {i} has shape {m.shape}, expected {(d, d)}")
        residual = float(np.max(np.abs(m.conj().T @ m - np.eye(d))))
        if residual > tol:
            raise UnitarityViolationError(i, residual)

    if probabilities is None:
        probs = np.full(len(mats), 1.0 / len(mats))
    else:
        probs = np.asarray(probabilities, dtype=np.float64).reshape(-1)
        if probs.shape[0] != len(mats):
            raise InvalidInputError(f"{probs.shape[0]} probabilities for {len(mats)} matrices")
        if not np.all(np.isfinite(probs)) or np.any(probs < 0):
            raise InvalidInputError("probabilities must be finite and non-negative")
        if abs(probs.sum() - 1.0) > PROB_TOL:
            raise InvalidInputError(f"probabilities sum to {probs.sum():.15g}, expected 1")
    return UnitaryEnsemble(
        dim=d,
        kind="discrete",
        matrices=_frozen(np.stack(mats)),
        probabilities=_frozen(probs),
        name=name,
    )


def shift_operator(d: int) -> np.ndarray:
    """Cyclic shift A e_j = e_{j+1 mod d}."""
    return np.roll(np.eye(d, dtype=np.complex128), 1, axis=0)


def clock_operator(d: int) -> np.ndarray:
    """Modulation B e_j = omega^j e_j with omega = exp(2 pi i / d)."""
    return np.diag(np.exp(2j * np.pi * np.arange(d) / d))


def fourier_weyl_family(d: int) -> np.ndarray:
    """All d^2 operators B^j A^k, element j*d + k, shape (d^2, d, d)."""
    if d < 2:
        raise InvalidParameterError(f"the Fourier-Weyl family needs d >= 2, got {d}")
    phases = np.exp(2j * np.pi * np.outer(np.arange(d), np.arange(d)) / d)  # [j, m] = omega^(j m)
    eye = np.eye(d, dtype=np.complex128)
    shifts = np.stack([np.roll(eye, k, axis=0) for k in range(d)])  # A^k
    family = phases[:, None, :, None] * shifts[None, :, :, :]
    return family.reshape(d * d, d, d)


def fourier_basis_vector(d: int, j: int) -> np.ndarray:
    """x_j = (omega^(m j) / sqrt d)_m; B^j A^k x_0 equals x_j for every k."""
    return np.exp(2j * np.pi * j * np.arange(d) / d) / np.sqrt(d)


def fourier_ensemble(d: int) -> UnitaryEnsemble:
    return discrete_ensemble(fourier_weyl_family(d), name="fourier")


def tensor_ensembles(e1: UnitaryEnsemble, e2: UnitaryEnsemble) -> UnitaryEnsemble:
    """Product family {U (x) V} with product probabilities."""
    if not (e1.is_discrete and e2.is_discrete):
        raise UnsupportedCombinationError("tensor products need two discrete ensembles")
    a, b = e1.matrices, e2.matrices
    d = e1.dim * e2.dim
    kron = np.einsum("aij,bkl->abikjl", a, b).reshape(a.shape[0] * b.shape[0], d, d)
    probs = np.outer(e1.probabilities, e2.probabilities).reshape(-1)
    return UnitaryEnsemble(
        dim=d,
        kind="discrete",
        matrices=_frozen(kron),
        probabilities=_frozen(probs),
        name=f"{e1.name}*{e2.name}",
    )


def pauli_tensor_ensemble(k: int, max_dim: int = MAX_DIM) -> UnitaryEnsemble:
    """All 4^k tensor words in the Pauli matrices, each with mass 4^-k."""
    if k < 1:
        raise InvalidParameterError(f"qubit count must be >= 1, got {k}")
    if 2 ** k > max_dim:
        raise ResourceLimitError(f"pauli({k}) acts on d={2 ** k}, above the cap max_dim={max_dim}")
    single = discrete_ensemble(PAULI, name="pauli")
    ens = reduce(tensor_ensembles, [single] * k)
    return UnitaryEnsemble(
        dim=ens.dim,
        kind="discrete",
        matrices=ens.matrices,
        probabilities=ens.probabilities,
        name=f"pauli({k})",
    )


def resolve_ensemble(
    name: str,
    d: Optional[int] = None,
    qubits: Optional[int] = None,
    max_dim: int = MAX_DIM,
) -> UnitaryEnsemble:
    """Build an ensemble from its command-line name.

    Names: ``haar``, ``fourier``, ``pauli`` (``qubits`` or a power-of-two ``d``)
    and ``file:<path>`` for Ensemble JSON.
    """
    if name.startswith("file:"):
        from ensembles.codec import load_ensemble

        ens = load_ensemble(name[len("file:"):])
        if d is not None and ens.dim != d:
            raise InvalidParameterError(f"ensemble file has dim={ens.dim}, requested d={d}")
        return ens
    if name == "pauli":
        if qubits is None:
            if d is None or d < 2 or d & (d - 1):
                raise InvalidParameterError("pauli needs --qubits k or a power-of-two dimension")
            qubits = d.bit_length() - 1
        if d is not None and d != 2 ** qubits:
            raise InvalidParameterError(f"pauli with {qubits} qubits acts on d={2 ** qubits}, not d={d}")
        return pauli_tensor_ensemble(qubits, max_dim=max_dim)
    if d is None:
        raise InvalidParameterError(f"ensemble '{name}' needs a dimension")
    if d > max_dim:
        raise ResourceLimitError(f"dimension d={d} exceeds cap max_dim={max_dim}")
    if name == "haar":
        return haar_ensemble(d)
    if name == "fourier":
        return fourier_ensemble(d)
    raise InvalidParameterError(
        f"unknown ensemble '{name}'; expected haar, fourier, pauli or file:<path>"
    )
