"""Lower bounds on A = sup over pure phi, psi of |tr P_psi (R - Phi)(P_phi)|.

The estimator alternates between the two arguments. For fixed phi the best
psi is the top (largest |eigenvalue|) eigenvector of the Hermitian matrix
Delta(P_phi); for fixed psi the best phi is the top eigenvector of
Delta^*(P_psi). Each half-step can only increase the objective, so every
restart climbs monotonically to a critical point. The reported value is
attained by the returned pair and is therefore a valid lower bound on A.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from certification.states import PureState, random_pure_state
from channels.kraus import KrausChannel, apply, apply_adjoint, apply_R
from linalg.core import EIG_TOL, HERM_TOL, hermitian_eig
from linalg.errors import InvalidInputError, InvalidParameterError
from runtime.pool import run_trials

RESTARTS = 32
MAX_ITERS = 200
CONV_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SupEstimate:
    value: float
    phi: PureState
    psi: PureState
    converged: bool
    iterations: int
    restart_index: int
    restart_values: List[float] = field(default_factory=list)


def _vec(x, d: int) -> np.ndarray:
    v = x.vector if isinstance(x, PureState) else np.asarray(x, dtype=np.complex128).reshape(-1)
    if v.shape[0] != d:
        raise InvalidInputError(f"state has dimension {v.shape[0]}, channel acts on d={d}")
    return v


def deviation_eval(channel: KrausChannel, phi, psi) -> float:
    """|1/d - (1/N) sum_i |<psi| U_i |phi>|^2|, without forming Delta(P_phi)."""
    d = channel.dim
    a, b = _vec(phi, d), _vec(psi, d)
    amps = (channel.operators @ a) @ b.conj()
    return float(abs(1.0 / d - np.mean(np.abs(amps) ** 2)))


def deviation_map(channel: KrausChannel, X) -> np.ndarray:
    """Delta(X) = R(X) - Phi(X)."""
    return apply_R(X) - apply(channel, X)


def adjoint_deviation_map(channel: KrausChannel, X) -> np.ndarray:
    """Delta^*(X) = R(X) - Phi^*(X); R is self-adjoint."""
    return apply_R(X) - apply_adjoint(channel, X)


def projector_deviation(operators: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Delta(P_phi) = Id/d - (1/N) sum_i (U_i phi)(U_i phi)^dag for a unit phi."""
    n, d, _ = operators.shape
    W = operators @ phi
    return np.eye(d) / d - (W.T @ W.conj()) / n


def adjoint_projector_deviation(operators: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """Delta^*(P_psi) = Id/d - (1/N) sum_i (U_i^dag psi)(U_i^dag psi)^dag for a unit psi."""
    n, d, _ = operators.shape
    W = np.einsum("nji,j->ni", operators.conj(), psi)
    return np.eye(d) / d - (W.T @ W.conj()) / n


def _top_vector(H: np.ndarray, herm_tol: float = HERM_TOL, eig_tol: float = EIG_TOL):
    # Hermitian by construction; drop round-off asymmetry near zero
    dec = hermitian_eig(0.5 * (H + H.conj().T), herm_tol=herm_tol, eig_tol=eig_tol)
    k = dec.top_abs()
    return dec.eigenvectors[:, k], abs(float(dec.eigenvalues[k]))


def _ascend(
    operators: np.ndarray,
    rng: np.random.Generator,
    max_iters: int,
    conv_tol: float,
    herm_tol: float,
    eig_tol: float,
):
    d = operators.shape[1]
    phi = random_pure_state(d, rng).vector
    psi = phi
    value = -1.0
    converged = False
    iters = 0
    for iters in range(1, max_iters + 1):
        psi, _ = _top_vector(projector_deviation(operators, phi), herm_tol, eig_tol)
        phi, new_value = _top_vector(adjoint_projector_deviation(operators, psi), herm_tol, eig_tol)
        if abs(new_value - value) < conv_tol:
            value = new_value
            converged = True
            break
        value = new_value
    return phi, psi, converged, iters


def estimate_sup(
    channel: KrausChannel,
    restarts: int = RESTARTS,
    max_iters: int = MAX_ITERS,
    conv_tol: float = CONV_TOL,
    rng: Optional[np.random.Generator] = None,
    threads: Optional[int] = 1,
    herm_tol: float = HERM_TOL,
    eig_tol: float = EIG_TOL,
) -> SupEstimate:
    """Best value of alternating eigen-ascent over independent restarts.

    Restart ``i`` draws its starting state from ``rng.spawn(restarts)[i]``,
    so a run with more restarts contains every branch of a run with fewer.
    Ties between restarts go to the lowest index.
    """
    if restarts < 1 or max_iters < 1:
        raise InvalidParameterError("restarts and max_iters must be >= 1")
    if conv_tol < 0:
        raise InvalidParameterError(f"conv_tol must be >= 0, got {conv_tol}")
    if rng is None:
        raise InvalidParameterError("estimate_sup needs a random stream for its starting states")

    ops = channel.operators
    children = rng.spawn(restarts)
    branches = run_trials(
        lambda i: _ascend(ops, children[i], max_iters, conv_tol, herm_tol, eig_tol),
        restarts,
        threads=threads,
    )

    values = []
    best = 0
    for i, (phi, psi, _, _) in enumerate(branches):
        values.append(deviation_eval(channel, phi, psi))
        if values[i] > values[best]:
            best = i
    phi, psi, converged, iters = branches[best]
    if not converged:
        print(f"[estimator] best restart {best} stopped at max_iters={max_iters} without converging")
    return SupEstimate(
        value=values[best],
        phi=PureState.from_vector(phi),
        psi=PureState.from_vector(psi),
        converged=converged,
        iterations=iters,
        restart_index=best,
        restart_values=values,
    )
