"""Cardinality bounds and sample-size rules for planning certification runs.

All bounds are computed in log space; ``*_bound`` helpers return ``inf``
when the value does not fit in a float.
"""
from __future__ import annotations

import math
from typing import Optional

from pydantic import BaseModel

from certification.nets import covering_lower_bound, icosphere_level, icosphere_size
from linalg.errors import InvalidParameterError

CONCENTRATION_CONSTANT = 1.0 / 6.0
CONSTANT_RULE_C = 150.0
NET_DELTA = 0.25


class NetPlan(BaseModel):
    d: int
    delta: float
    log10_bound: float
    bound: Optional[float]
    lower_bound: Optional[float]
    cap: int
    feasible: bool
    exact_construction: bool
    constructed_size: Optional[int] = None


def _from_log10(value: float) -> float:
    return 10.0 ** value if value < 308.0 else float("inf")


def log10_net_size_bound(d: int, delta: float) -> float:
    if d < 1:
        raise InvalidParameterError(f"dimension must be >= 1, got {d}")
    if not 0.0 < delta < 1.0:
        raise InvalidParameterError(f"net radius must satisfy 0 < delta < 1, got {delta}")
    return 2 * d * math.log10(5.0 / delta)


def net_size_bound(d: int, delta: float) -> float:
    """(5/delta)^(2d): size of a delta-net of pure states on C^d."""
    return _from_log10(log10_net_size_bound(d, delta))


def log10_volumetric_bound(n: int, eps: float) -> float:
    if n < 1:
        raise InvalidParameterError(f"real dimension must be >= 1, got {n}")
    if eps <= 0:
        raise InvalidParameterError(f"eps must be positive, got {eps}")
    return n * math.log10(1.0 + 2.0 / eps)


def volumetric_bound(n: int, eps: float) -> float:
    """(1 + 2/eps)^n: eps-net of the unit ball of an n-dimensional normed space."""
    return _from_log10(log10_volumetric_bound(n, eps))


def plan_net(d: int, delta: float, cap: int) -> NetPlan:
    """Compare the net-size bound, and for qubits the constructed net size, against ``cap``."""
    log10_bound = log10_net_size_bound(d, delta)
    bound = _from_log10(log10_bound)
    constructed = None
    lower = covering_lower_bound(d, delta)
    feasible = lower <= cap
    if d == 2:
        found = icosphere_level(delta, cap)
        feasible = found is not None
        if found is not None:
            constructed = icosphere_size(found[0])
    elif d == 1:
        constructed, feasible = 1, True
    return NetPlan(
        d=d,
        delta=delta,
        log10_bound=log10_bound,
        bound=None if math.isinf(bound) else bound,
        lower_bound=None if math.isinf(lower) else lower,
        cap=cap,
        feasible=feasible,
        exact_construction=d <= 2,
        constructed_size=constructed,
    )


def _check_eps(eps: float) -> None:
    if not 0.0 < eps < 1.0:
        raise InvalidParameterError(f"epsilon must satisfy 0 < eps < 1, got {eps}")


def log_union_failure_bound(
    d: int,
    eps: float,
    n: int,
    c: float = CONCENTRATION_CONSTANT,
    delta: float = NET_DELTA,
) -> float:
    """Natural log of 2 (5/delta)^(4d) exp(-c ((1 - 2 delta) eps)^2 N).

    Union bound over pairs of a delta-net: the channel fails to be
    eps-randomizing only if some net pair deviates by more than
    (1 - 2 delta) eps / d. At delta = 1/4 the exponent is c eps^2 N / 4.
    """
    _check_eps(eps)
    if not 0.0 < delta < 0.5:
        raise InvalidParameterError(f"net radius must satisfy 0 < delta < 1/2, got {delta}")
    t = (1.0 - 2.0 * delta) * eps
    return math.log(2.0) + 4 * d * math.log(5.0 / delta) - c * t * t * n


def union_failure_bound(d: int, eps: float, n: int, c: float = CONCENTRATION_CONSTANT, delta: float = NET_DELTA) -> float:
    """Upper bound on the probability that N Haar unitaries are not eps-randomizing (capped at 1)."""
    return math.exp(min(0.0, log_union_failure_bound(d, eps, n, c, delta)))


def union_sample_size(d: int, eps: float, c: float = CONCENTRATION_CONSTANT, delta: float = NET_DELTA) -> int:
    """Smallest N for which the union bound drops below 1."""
    _check_eps(eps)
    t = (1.0 - 2.0 * delta) * eps
    needed = (math.log(2.0) + 4 * d * math.log(5.0 / delta)) / (c * t * t)
    return int(math.floor(needed)) + 1


def constant_rule_sample_size(d: int, eps: float, C: float = CONSTANT_RULE_C) -> int:
    """C d / eps^2 rounded up."""
    _check_eps(eps)
    return int(math.ceil(C * d / eps ** 2 - 1e-9))


def polylog_sample_size(d: int, eps: float, C: float = 1.0, eta: Optional[float] = None) -> int:
    """C d (log d)^6 / eps^2 for arbitrary isotropic ensembles.

    With ``eta`` the count is divided by eta^2, the Markov form that holds
    with probability at least 1 - eta.
    """
    _check_eps(eps)
    value = C * d * math.log(d) ** 6 / eps ** 2
    if eta is not None:
        if not 0.0 < eta < 1.0:
            raise InvalidParameterError(f"eta must satisfy 0 < eta < 1, got {eta}")
        value /= eta ** 2
    return max(1, int(math.ceil(value - 1e-9)))


def harmonic_number(d: int) -> float:
    return math.fsum(1.0 / k for k in range(1, d + 1))


def coupon_lower_bound(d: int) -> float:
    """d H_d: expected uniform draws from the Fourier-Weyl family until Phi(P_x0) has full rank."""
    if d < 1:
        raise InvalidParameterError(f"dimension must be >= 1, got {d}")
    return d * harmonic_number(d)
