"""Haar-distributed unitaries from the QR factorization of complex Gaussian matrices."""
from __future__ import annotations

import numpy as np

from linalg.errors import InvalidParameterError


def sample_haar_batch(d: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` independent d x d Haar unitaries, shape (count, d, d)."""
    if d < 1:
        raise InvalidParameterError(f"dimension must be >= 1, got {d}")
    if count < 0:
        raise InvalidParameterError(f"count must be >= 0, got {count}")
    z = (rng.standard_normal((count, d, d)) + 1j * rng.standard_normal((count, d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=1, axis2=2)
    # fix the column phases so diag(R) > 0; plain QR output is not Haar
    return q * (diag / np.abs(diag))[:, None, :]


def sample_haar(d: int, rng: np.random.Generator) -> np.ndarray:
    return sample_haar_batch(d, 1, rng)[0]
