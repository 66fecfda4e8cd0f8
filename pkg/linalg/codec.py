"""Matrix JSON format: {"rows": r, "cols": c, "entries": [[re, im], ...]} row-major."""
from __future__ import annotations

from typing import Any, Dict

import numpy as np

from linalg.core import as_matrix
from linalg.errors import InvalidInputError


def matrix_to_json(A) -> Dict[str, Any]:
    a = as_matrix(A)
    flat = a.reshape(-1)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in flat],
    }


def matrix_from_json(obj: Dict[str, Any]) -> np.ndarray:
    try:
        rows = int(obj["rows"])
        cols = int(obj["cols"])
        entries = obj["entries"]
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidInputError(f"malformed matrix object: {e}")
    if rows < 1 or cols < 1:
        raise InvalidInputError(f"matrix dimensions must be positive, got {rows}x{cols}")
    if len(entries) != rows * cols:
        raise InvalidInputError(f"expected {rows * cols} entries, got {len(entries)}")
    try:
        pairs = np.asarray(entries, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise InvalidInputError(f"matrix entries must be [re, im] pairs: {e}")
    if pairs.shape != (rows * cols, 2):
        raise InvalidInputError("matrix entries must be [re, im] pairs")
    return as_matrix((pairs[:, 0] + 1j * pairs[:, 1]).reshape(rows, cols))


def vector_to_json(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=np.complex128).reshape(-1)]


def vector_from_json(entries) -> np.ndarray:
    pairs = np.asarray(entries, dtype=np.float64)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise InvalidInputError("vector entries must be [re, im] pairs")
    return pairs[:, 0] + 1j * pairs[:, 1]
