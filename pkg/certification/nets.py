"""Finite nets of pure states with a covering radius in trace distance.

For qubits the net is the vertex set of a subdivided icosahedron on the
Bloch sphere. Trace distance between pure qubit states equals the Euclidean
distance between their Bloch vectors, so the chord circumradius of every
spherical face bounds the covering radius and the certificate is exact.
In higher dimension the net is a greedy separated set over random probes
and its covering radius is only estimated.
"""
from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from certification.states import PureState, canonicalize_rows, random_pure_states
from linalg.codec import vector_from_json, vector_to_json
from linalg.errors import InvalidInputError, InvalidParameterError, ResourceLimitError

MAX_NET_SIZE = 100_000
DEFAULT_PROBES = 100_000
OVERLAP_CHUNK = 4096


@dataclass(frozen=True, eq=False)
class PureStateNet:
    dim: int
    vectors: np.ndarray  # (size, dim), canonical unit rows
    delta: float
    certificate: str  # "exact" or "heuristic"
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return int(self.vectors.shape[0])

    def state(self, index: int) -> PureState:
        return PureState.from_vector(self.vectors[index])


# -------- Bloch sphere geodesic subdivision --------

def _icosahedron() -> Tuple[List[np.ndarray], List[Tuple[int, int, int]]]:
    g = (1.0 + np.sqrt(5.0)) / 2.0
    raw = []
    for s1, s2 in itertools.product((-1.0, 1.0), repeat=2):
        raw += [(0.0, s1, s2 * g), (s1, s2 * g, 0.0), (s2 * g, 0.0, s1)]
    pts = np.array(raw)
    # edges are exactly the pairs at the minimal distance 2
    close = np.abs(np.linalg.norm(pts[:, None] - pts[None, :], axis=2) - 2.0) < 1e-9
    faces = [
        (a, b, c)
        for a, b, c in itertools.combinations(range(len(pts)), 3)
        if close[a, b] and close[b, c] and close[a, c]
    ]
    verts = [p / np.linalg.norm(p) for p in pts]
    return verts, faces


def _subdivide(
    verts: List[np.ndarray],
    faces: List[Tuple[int, int, int]],
) -> List[Tuple[int, int, int]]:
    cache: Dict[Tuple[int, int], int] = {}

    def midpoint(i: int, j: int) -> int:
        key = (i, j) if i < j else (j, i)
        if key not in cache:
            m = verts[i] + verts[j]
            verts.append(m / np.linalg.norm(m))
            cache[key] = len(verts) - 1
        return cache[key]

    out = []
    for a, b, c in faces:
        ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
        out += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
    return out


def face_circumradii(points: np.ndarray, faces: np.ndarray) -> np.ndarray:
    """Chord distance from each face's vertices to its spherical circumcenter."""
    A, B, C = points[faces[:, 0]], points[faces[:, 1]], points[faces[:, 2]]
    normal = np.cross(B - A, C - A)
    normal /= np.linalg.norm(normal, axis=1)[:, None]
    # the plane's foot point from the origin is the planar circumcenter
    normal *= np.sign(np.sum(normal * A, axis=1))[:, None]
    return np.linalg.norm(A - normal, axis=1)


def icosphere_size(level: int) -> int:
    return 10 * 4 ** level + 2


def states_from_bloch(points: np.ndarray) -> np.ndarray:
    x, y, z = points[:, 0], points[:, 1], points[:, 2]
    theta = np.arccos(np.clip(z, -1.0, 1.0))
    phi = np.arctan2(y, x)
    vecs = np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=1)
    return canonicalize_rows(vecs)


def _refine(delta: float, max_size: int):
    verts, faces = _icosahedron()
    level = 0
    while True:
        radius = float(face_circumradii(np.array(verts), np.array(faces)).max())
        if radius <= delta:
            return verts, level, radius
        if icosphere_size(level + 1) > max_size:
            return None
        faces = _subdivide(verts, faces)
        level += 1


def icosphere_level(delta: float, max_size: int = MAX_NET_SIZE) -> Optional[Tuple[int, float]]:
    """Smallest subdivision level whose faces all have radius <= delta, with that radius."""
    found = _refine(delta, max_size)
    return None if found is None else found[1:]


def _icosphere_net(delta: float, max_size: int) -> PureStateNet:
    found = _refine(delta, max_size)
    if found is None:
        raise ResourceLimitError(
            f"exact qubit net for delta={delta} needs more than max_net_size={max_size} states"
        )
    verts, level, radius = found
    print(f"[nets] icosphere level={level} size={len(verts)} max_face_radius={radius:.4f}")
    return PureStateNet(
        dim=2,
        vectors=states_from_bloch(np.array(verts)),
        delta=delta,
        certificate="exact",
        metadata={"method": "icosphere", "level": level, "max_face_radius": radius},
    )


# -------- greedy heuristic nets --------

def max_overlaps(candidates: np.ndarray, net: np.ndarray, chunk: int = OVERLAP_CHUNK) -> np.ndarray:
    """For each candidate row, max over net rows of |<net, candidate>|^2."""
    if net.shape[0] == 0:
        return np.zeros(candidates.shape[0])
    out = np.empty(candidates.shape[0])
    for start in range(0, candidates.shape[0], chunk):
        block = candidates[start:start + chunk]
        out[start:start + chunk] = np.max(np.abs(block @ net.conj().T) ** 2, axis=1)
    return out


def covering_lower_bound(d: int, delta: float) -> float:
    """(2/delta)^(2(d-1)): every delta-net of pure states on C^d has at least this many states.

    A trace-distance ball of radius delta around a pure state holds the
    fraction (delta^2/4)^(d-1) of all pure states under the unitarily
    invariant measure.
    """
    exponent = 2 * (d - 1) * np.log10(2.0 / delta)
    return float(10.0 ** exponent) if exponent < 308 else float("inf")


def _greedy_net(
    d: int,
    delta: float,
    rng: np.random.Generator,
    probes: int,
    max_size: int,
) -> PureStateNet:
    floor = covering_lower_bound(d, delta)
    if floor > max_size:
        raise ResourceLimitError(
            f"any net for d={d}, delta={delta} needs at least {floor:.3g} states, above max_net_size={max_size}"
        )
    covered = 1.0 - delta ** 2 / 4.0
    net = np.empty((0, d), dtype=np.complex128)
    rounds = 0
    while True:
        cand = random_pure_states(d, probes, rng)
        cand = cand[max_overlaps(cand, net) < covered]
        picked = []
        while cand.shape[0]:
            u = cand[0]
            picked.append(u)
            if net.shape[0] + len(picked) > max_size:
                raise ResourceLimitError(
                    f"heuristic net for d={d}, delta={delta} exceeds max_net_size={max_size}"
                )
            cand = cand[1:][np.abs(cand[1:] @ u.conj()) ** 2 < covered]
        rounds += 1
        if not picked:
            break
        net = np.vstack([net, np.array(picked)])

    validation = random_pure_states(d, probes, rng)
    worst = float(max_overlaps(validation, net).min())
    estimated = 2.0 * float(np.sqrt(max(0.0, 1.0 - worst)))
    print(f"[nets] greedy d={d} size={net.shape[0]} rounds={rounds} estimated_radius={estimated:.4f}")
    return PureStateNet(
        dim=d,
        vectors=net,
        delta=delta,
        certificate="heuristic",
        metadata={
            "method": "greedy",
            "rounds": rounds,
            "probe_count": probes,
            "estimated_radius": estimated,
        },
    )


def build_net(
    d: int,
    delta: float,
    rng: Optional[np.random.Generator] = None,
    probes: int = DEFAULT_PROBES,
    max_size: int = MAX_NET_SIZE,
) -> PureStateNet:
    """Net of pure states with covering radius ``delta`` in trace distance.

    Qubit nets are exact and need no randomness; for d >= 3 ``rng`` is required.
    """
    if not 0.0 < delta < 2.0:
        raise InvalidParameterError(f"net radius must satisfy 0 < delta < 2, got {delta}")
    if d < 1:
        raise InvalidParameterError(f"dimension must be >= 1, got {d}")
    if d == 1:
        return PureStateNet(
            dim=1,
            vectors=np.ones((1, 1), dtype=np.complex128),
            delta=delta,
            certificate="exact",
            metadata={"method": "trivial"},
        )
    if d == 2:
        return _icosphere_net(delta, max_size)
    if rng is None:
        raise InvalidParameterError("heuristic nets for d >= 3 need a random stream")
    if probes < 1:
        raise InvalidParameterError(f"probe count must be >= 1, got {probes}")
    return _greedy_net(d, delta, rng, probes, max_size)


def save_net(net: PureStateNet, path: Union[str, Path]) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "dim": net.dim,
        "delta": net.delta,
        "certificate": net.certificate,
        "metadata": net.metadata,
        "states": [vector_to_json(v) for v in net.vectors],
    }
    tmp = p.with_suffix(p.suffix + ".tmp")
    tmp.write_text(json.dumps(payload), encoding="utf-8")
    os.replace(tmp, p)
    return p


def load_net(path: Union[str, Path]) -> PureStateNet:
    p = Path(path)
    try:
        obj = json.loads(p.read_text(encoding="utf-8"))
        dim = int(obj["dim"])
        delta = float(obj["delta"])
        certificate = obj["certificate"]
        vectors = np.array([vector_from_json(s) for s in obj["states"]])
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise InvalidInputError(f"malformed net file {p}: {e}")
    if certificate not in ("exact", "heuristic"):
        raise InvalidInputError(f"unknown net certificate '{certificate}'")
    if vectors.ndim != 2 or vectors.shape[1] != dim:
        raise InvalidInputError(f"net states do not match dim={dim}")
    return PureStateNet(
        dim=dim,
        vectors=canonicalize_rows(vectors),
        delta=delta,
        certificate=certificate,
        metadata=dict(obj.get("metadata") or {}),
    )
