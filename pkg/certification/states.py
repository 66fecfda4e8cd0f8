"""Pure states with a canonical global phase, and qubit Bloch coordinates."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from linalg.core import projector
from linalg.errors import InvalidInputError

PHASE_TOL = 1e-12


def canonicalize_rows(vectors: np.ndarray) -> np.ndarray:
    """Normalize each row and make its first nonzero entry real positive."""
    v = np.atleast_2d(np.asarray(vectors, dtype=np.complex128))
    norms = np.linalg.norm(v, axis=1)
    if np.any(norms == 0) or not np.all(np.isfinite(norms)):
        raise InvalidInputError("pure states need non-zero finite vectors")
    v = v / norms[:, None]
    mags = np.abs(v)
    first = np.argmax(mags > PHASE_TOL, axis=1)
    lead = v[np.arange(v.shape[0]), first]
    return v * (np.conj(lead) / np.abs(lead))[:, None]


@dataclass(frozen=True, eq=False)
class PureState:
    vector: np.ndarray

    @classmethod
    def from_vector(cls, x) -> "PureState":
        v = canonicalize_rows(np.asarray(x).reshape(1, -1))[0]
        v.setflags(write=False)
        return cls(vector=v)

    @property
    def dim(self) -> int:
        return int(self.vector.shape[0])

    def projector(self) -> np.ndarray:
        return projector(self.vector)


def _vec(x) -> np.ndarray:
    return x.vector if isinstance(x, PureState) else np.asarray(x, dtype=np.complex128).reshape(-1)


def random_pure_states(d: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` uniformly random canonical unit vectors, shape (count, d)."""
    z = rng.standard_normal((count, d)) + 1j * rng.standard_normal((count, d))
    return canonicalize_rows(z)


def random_pure_state(d: int, rng: np.random.Generator) -> PureState:
    return PureState.from_vector(random_pure_states(d, 1, rng)[0])


def trace_distance_pure(x, y) -> float:
    """||P_x - P_y||_1 = 2 sqrt(1 - |<x, y>|^2)."""
    a, b = _vec(x), _vec(y)
    if a.shape != b.shape:
        raise InvalidInputError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    overlap = min(1.0, abs(np.vdot(a, b)) ** 2)
    return 2.0 * float(np.sqrt(1.0 - overlap))


def bloch_vector(x) -> np.ndarray:
    """Bloch coordinates (2 Re(a* b), 2 Im(a* b), |a|^2 - |b|^2) of a qubit state."""
    v = _vec(x)
    if v.shape[0] != 2:
        raise InvalidInputError("Bloch coordinates exist for qubit states only")
    a, b = v
    ab = np.conj(a) * b
    return np.array([2 * ab.real, 2 * ab.imag, abs(a) ** 2 - abs(b) ** 2])


def state_from_bloch(r) -> PureState:
    r = np.asarray(r, dtype=np.float64).reshape(3)
    norm = np.linalg.norm(r)
    if norm == 0:
        raise InvalidInputError("the zero vector is not a pure qubit state")
    x, y, z = r / norm
    theta = np.arccos(np.clip(z, -1.0, 1.0))
    phi = np.arctan2(y, x)
    return PureState.from_vector([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])
