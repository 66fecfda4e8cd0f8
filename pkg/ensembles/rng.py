"""Seeded counter-based random streams.

Every random draw in the project comes from a stream keyed by
``(master seed, *keys)``; there is no global generator.
"""
from __future__ import annotations

import numpy as np

from linalg.errors import InvalidParameterError

# first key of every derived stream
SAMPLE_STREAM = 0
ESTIMATOR_STREAM = 1
NET_STREAM = 2


def stream(seed: int, *keys: int) -> np.random.Generator:
    if seed is None:
        raise InvalidParameterError("a master seed is required for randomized work")
    seed = int(seed)
    if seed < 0 or any(int(k) < 0 for k in keys):
        raise InvalidParameterError("seeds and stream keys must be non-negative integers")
    ss = np.random.SeedSequence([seed, *(int(k) for k in keys)])
    return np.random.Generator(np.random.Philox(ss))
