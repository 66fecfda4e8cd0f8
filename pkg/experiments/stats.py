"""Summary statistics and least-squares fits for experiment cells."""
from __future__ import annotations

from typing import Sequence, Tuple

import numpy as np
from pydantic import BaseModel


class Summary(BaseModel):
    count: int
    mean: float
    median: float
    stderr: float
    min: float
    max: float


def summarize(values: Sequence[float]) -> Summary:
    x = np.asarray(values, dtype=np.float64)
    if x.size == 0:
        raise ValueError("cannot summarize an empty sample")
    stderr = float(x.std(ddof=1) / np.sqrt(x.size)) if x.size > 1 else 0.0
    return Summary(
        count=int(x.size),
        mean=float(x.mean()),
        median=float(np.median(x)),
        stderr=stderr,
        min=float(x.min()),
        max=float(x.max()),
    )


def ols_fit(x: Sequence[float], y: Sequence[float]) -> Tuple[float, float]:
    """(slope, intercept) of the least-squares line y = slope * x + intercept."""
    xs = np.asarray(x, dtype=np.float64)
    ys = np.asarray(y, dtype=np.float64)
    if xs.size < 2 or np.unique(xs).size < 2:
        raise ValueError("a line fit needs at least two distinct x values")
    slope, intercept = np.polyfit(xs, ys, 1)
    return float(slope), float(intercept)


def non_increasing(means: Sequence[float], stderrs: Sequence[float], k: float = 2.0) -> bool:
    """True when each mean exceeds its predecessor by at most k standard errors."""
    for i in range(1, len(means)):
        slack = k * max(stderrs[i - 1], stderrs[i])
        if means[i] > means[i - 1] + slack:
            return False
    return True
