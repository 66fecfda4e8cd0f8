"""Decide whether a uniform unitary channel is eps-randomizing.

A channel is eps-randomizing when ||Phi(rho) - Id/d||_inf <= eps/d for every
state rho. With Delta = R - Phi this is A <= eps/d where

    A = sup over pure phi, psi of |tr P_psi Delta(P_phi)|.

Every explicit pair (phi, psi) gives a lower bound on A; upper bounds come
from an exact net (A <= B / (1 - 2 delta)) or from the Choi matrix
(A <= ||A_Phi - Id/d||_inf).
"""
from __future__ import annotations

import time
import warnings
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from certification.estimator import SupEstimate, deviation_eval, estimate_sup, projector_deviation
from certification.nets import PureStateNet, build_net
from certification.states import PureState
from channels.kraus import KrausChannel, choi, kraus_rank
from ensembles.rng import ESTIMATOR_STREAM, NET_STREAM, stream
from linalg.codec import vector_to_json
from linalg.errors import (
    InvalidInputError,
    InvalidParameterError,
    LemmaPreconditionError,
    ResourceLimitError,
    UnsupportedCombinationError,
)
from runtime.settings import RECORD_FORMAT_VERSION, TOOL_VERSION, Settings, default_settings

CHOI_MAX_DIM = 16
SANDWICH_SLACK = 1e-9
NET_CHUNK_ELEMENTS = 4_000_000

Verdict = Literal["certified", "refuted", "heuristic_pass", "heuristic_fail"]


class CertifyParams(BaseModel):
    restarts: int = Field(32, ge=1)
    max_iters: int = Field(200, ge=1)
    conv_tol: float = Field(1e-10, ge=0)
    net_delta: float = Field(0.25, gt=0, lt=2)
    net_probes: int = Field(100_000, ge=1)
    max_net_size: int = Field(100_000, ge=1)
    threads: Optional[int] = Field(None, ge=1)
    herm_tol: float = Field(1e-9, gt=0)
    eig_tol: float = Field(1e-9, gt=0)
    rank_tol: float = Field(1e-8, gt=0)

    @classmethod
    def from_settings(cls, settings: Settings, **overrides: Any) -> "CertifyParams":
        base = dict(
            restarts=settings.restarts,
            max_iters=settings.max_iters,
            conv_tol=settings.conv_tol,
            net_delta=settings.net_delta,
            net_probes=settings.net_probes,
            max_net_size=settings.max_net_size,
            threads=settings.threads,
            herm_tol=settings.herm_tol,
            eig_tol=settings.eig_tol,
            rank_tol=settings.rank_tol,
        )
        base.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**base)


class CertificationReport(BaseModel):
    format_version: int = RECORD_FORMAT_VERSION
    tool_version: str = TOOL_VERSION
    d: int
    n: int
    epsilon: float
    threshold: float
    method: str
    verdict: Verdict
    ensemble: Optional[str] = None
    seed: Optional[int] = None
    estimator_value: Optional[float] = None
    estimator_converged: Optional[bool] = None
    net_value: Optional[float] = None
    net_delta: Optional[float] = None
    net_size: Optional[int] = None
    net_certificate: Optional[str] = None
    net_estimated_radius: Optional[float] = None
    certified_upper_bound: Optional[float] = None
    choi_bound: Optional[float] = None
    rank_deficient: bool = False
    kraus_rank: Optional[int] = None
    witness_source: Optional[str] = None
    witness_deviation: Optional[float] = None
    witness_phi: Optional[List[List[float]]] = None
    witness_psi: Optional[List[List[float]]] = None
    witness_inf_deviation: Optional[float] = None
    witness_spectrum: Optional[Tuple[float, float]] = None
    spectral_window: Tuple[float, float]
    spectrum_in_window: Optional[bool] = None
    notes: List[str] = Field(default_factory=list)
    settings: Dict[str, Any] = Field(default_factory=dict)
    run_info: Dict[str, Any] = Field(default_factory=dict)


@dataclass(frozen=True)
class NetScan:
    value: float
    upper: float
    phi_index: int
    psi_index: int


def _check_net(channel: KrausChannel, net: PureStateNet) -> None:
    if not 0.0 < net.delta < 0.5:
        raise LemmaPreconditionError(
            f"the net bound needs 0 < delta < 1/2, got delta={net.delta}"
        )
    if net.dim != channel.dim:
        raise InvalidInputError(f"net has dim={net.dim}, channel acts on d={channel.dim}")


def scan_net(channel: KrausChannel, net: PureStateNet) -> NetScan:
    """Max of deviation_eval over all ordered net pairs, with the maximizing indices.

    Delta(P_phi) is formed once per net state, so the pair sweep costs
    O(|net|^2 d^2) after O(|net| N d^2) preparation.
    """
    _check_net(channel, net)
    U = channel.operators
    n, d, _ = U.shape
    X = net.vectors
    chunk = max(1, NET_CHUNK_ELEMENTS // (d * max(n, X.shape[0])))
    best, best_m, best_p = -1.0, 0, 0
    for start in range(0, X.shape[0], chunk):
        block = X[start:start + chunk]
        W = np.einsum("nab,mb->mna", U, block)
        H = np.eye(d) / d - np.einsum("mna,mnb->mab", W, W.conj()) / n
        # values[m, p] = |x_p^dag H_m x_p|
        values = np.abs(np.sum((X.conj() @ H) * X, axis=2).real)
        m, p = np.unravel_index(int(np.argmax(values)), values.shape)
        if values[m, p] > best:
            best, best_m, best_p = float(values[m, p]), start + int(m), int(p)
    return NetScan(value=best, upper=best / (1.0 - 2.0 * net.delta), phi_index=best_m, psi_index=best_p)


def net_bound(channel: KrausChannel, net: PureStateNet) -> Tuple[float, float]:
    """(B, B / (1 - 2 delta)); the second is a bound on A when the net is exact."""
    scan = scan_net(channel, net)
    return scan.value, scan.upper


def choi_bound(channel: KrausChannel) -> float:
    """||A_Phi - Id/d||_inf, an upper bound on A in every dimension.

    tr P_psi Delta(P_phi) = v^dag (Id/d - A_Phi) v with the unit vector
    v = conj(phi) (x) psi, so A never exceeds the operator norm.
    """
    d = channel.dim
    if d > CHOI_MAX_DIM:
        raise ResourceLimitError(f"Choi bound is capped at d={CHOI_MAX_DIM}, got d={d}")
    w = np.linalg.eigvalsh(choi(channel) - np.eye(d * d) / d)
    return float(np.max(np.abs(w)))


def rank_deficiency_witness(channel: KrausChannel) -> Optional[Tuple[float, PureState, PureState]]:
    """For N < d, a pair with deviation exactly 1/d, else None.

    Phi(P_e0) is spanned by the N vectors U_i e_0, so any psi orthogonal to
    them has <psi|Phi(P_e0)|psi> = 0.
    """
    n, d = channel.n, channel.dim
    if n >= d:
        return None
    phi = np.zeros(d, dtype=np.complex128)
    phi[0] = 1.0
    W = channel.operators[:, :, 0]
    _, _, vh = np.linalg.svd(W.conj(), full_matrices=True)
    psi = vh[-1].conj()
    return deviation_eval(channel, phi, psi), PureState.from_vector(phi), PureState.from_vector(psi)


def _spectrum_check(channel: KrausChannel, phi: PureState, epsilon: float) -> Tuple[float, Tuple[float, float], bool, bool]:
    d = channel.dim
    H = projector_deviation(channel.operators, phi.vector)
    w = np.linalg.eigvalsh(np.eye(d) / d - H)
    lo, hi = (1.0 - epsilon) / d, (1.0 + epsilon) / d
    inf_dev = float(np.max(np.abs(np.linalg.eigvalsh(H))))
    in_window = bool(w.min() >= lo and w.max() <= hi)
    return inf_dev, (float(w.min()), float(w.max())), in_window, inf_dev <= epsilon / d


def certify_randomizing(
    channel: KrausChannel,
    epsilon: float,
    method: str = "both",
    params: Optional[CertifyParams] = None,
    seed: Optional[int] = None,
    ensemble: Optional[str] = None,
    settings: Optional[Settings] = None,
) -> CertificationReport:
    if not 0.0 < epsilon < 1.0:
        raise InvalidParameterError(f"epsilon must satisfy 0 < eps < 1, got {epsilon}")
    if method not in ("net", "estimator", "both"):
        raise InvalidParameterError(f"method must be net, estimator or both, got '{method}'")
    if not channel.certified:
        raise UnsupportedCombinationError("certification needs a uniform unitary channel")
    settings = settings or default_settings()
    params = params or CertifyParams.from_settings(settings)

    started = time.perf_counter()
    d, n = channel.dim, channel.n
    threshold = epsilon / d
    notes: List[str] = []
    print(f"[certify] d={d} N={n} eps={epsilon} method={method} threshold={threshold:.6g}")

    # (value, source, phi, psi) of every explicit lower-bound pair
    witnesses: List[Tuple[float, str, PureState, PureState]] = []

    deficient = rank_deficiency_witness(channel)
    if deficient is not None:
        value, phi, psi = deficient
        witnesses.append((value, "rank_deficiency", phi, psi))
        notes.append(f"N={n} < d={d}: Phi(P_phi) is rank deficient, deviation 1/d attained")

    choi_value = rank = None
    if d <= CHOI_MAX_DIM:
        choi_value = choi_bound(channel)
        rank = kraus_rank(channel, rank_tol=params.rank_tol)

    estimate: Optional[SupEstimate] = None
    if method in ("estimator", "both"):
        if seed is None:
            raise InvalidParameterError("the estimator needs a master seed")
        estimate = estimate_sup(
            channel,
            restarts=params.restarts,
            max_iters=params.max_iters,
            conv_tol=params.conv_tol,
            rng=stream(seed, ESTIMATOR_STREAM),
            threads=params.threads,
            herm_tol=params.herm_tol,
            eig_tol=params.eig_tol,
        )
        witnesses.append((estimate.value, "estimator", estimate.phi, estimate.psi))
        print(f"[certify] estimator A_hat={estimate.value:.6g} converged={estimate.converged}")

    net: Optional[PureStateNet] = None
    scan = None
    if method in ("net", "both"):
        if d >= 3:
            msg = f"exact nets exist for d <= 2 only; d={d} uses a heuristic net"
            warnings.warn(msg, RuntimeWarning)
            print(f"[certify] {msg}")
            notes.append(msg)
        try:
            rng = stream(seed, NET_STREAM) if d >= 3 else None
            net = build_net(d, params.net_delta, rng=rng, probes=params.net_probes, max_size=params.max_net_size)
        except ResourceLimitError as e:
            if d <= 2:
                raise
            msg = f"heuristic net skipped: {e}"
            warnings.warn(msg, RuntimeWarning)
            print(f"[certify] {msg}")
            notes.append(msg)
        if net is not None:
            scan = scan_net(channel, net)
            witnesses.append((scan.value, "net", net.state(scan.phi_index), net.state(scan.psi_index)))
            print(
                f"[certify] net size={net.size} certificate={net.certificate} "
                f"B={scan.value:.6g} upper={scan.upper:.6g}"
            )

    exact_upper = scan.upper if scan is not None and net.certificate == "exact" else None
    if estimate is not None:
        for label, upper in (("net", exact_upper), ("Choi", choi_value)):
            if upper is not None and estimate.value > upper + SANDWICH_SLACK:
                msg = f"estimator value {estimate.value:.6g} exceeds the {label} upper bound {upper:.6g}"
                warnings.warn(msg, RuntimeWarning)
                notes.append(msg)

    lower = max((w[0] for w in witnesses), default=0.0)
    if lower > threshold:
        verdict = "refuted"
    elif (exact_upper is not None and exact_upper <= threshold) or (
        choi_value is not None and choi_value <= threshold
    ):
        verdict = "certified"
    else:
        basis = []
        if estimate is not None:
            basis.append(estimate.value)
        if scan is not None:
            basis.append(scan.upper)
        if not basis:
            notes.append("no estimator or net value available; decision rests on the rank check alone")
        verdict = "heuristic_pass" if max(basis, default=lower) <= threshold else "heuristic_fail"

    report = CertificationReport(
        d=d,
        n=n,
        epsilon=epsilon,
        threshold=threshold,
        method=method,
        verdict=verdict,
        ensemble=ensemble,
        seed=seed,
        estimator_value=estimate.value if estimate else None,
        estimator_converged=estimate.converged if estimate else None,
        net_value=scan.value if scan else None,
        net_delta=net.delta if net else None,
        net_size=net.size if net else None,
        net_certificate=net.certificate if net else None,
        net_estimated_radius=net.metadata.get("estimated_radius") if net else None,
        certified_upper_bound=scan.upper if scan else None,
        choi_bound=choi_value,
        kraus_rank=rank,
        rank_deficient=deficient is not None,
        spectral_window=((1.0 - epsilon) / d, (1.0 + epsilon) / d),
        notes=notes,
        settings={**settings.as_dict(), **params.model_dump()},
    )

    if witnesses:
        value, source, phi, psi = max(witnesses, key=lambda w: w[0])
        inf_dev, spectrum, in_window, inf_ok = _spectrum_check(channel, phi, epsilon)
        if in_window != inf_ok:
            notes.append("spectral window and inf-norm checks disagree at the witness within round-off")
        report.witness_source = source
        report.witness_deviation = value
        report.witness_phi = vector_to_json(phi.vector)
        report.witness_psi = vector_to_json(psi.vector)
        report.witness_inf_deviation = inf_dev
        report.witness_spectrum = spectrum
        report.spectrum_in_window = in_window

    report.run_info = {
        "wall_seconds": time.perf_counter() - started,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    print(f"[certify] verdict={verdict} lower={lower:.6g} threshold={threshold:.6g}")
    return report
