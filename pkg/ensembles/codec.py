"""Ensemble JSON.

    {"dim": d, "kind": "haar"}
    {"dim": d, "kind": "discrete", "probabilities": [...], "unitaries": [matrix, ...]}
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, Union

from ensembles.families import UnitaryEnsemble, discrete_ensemble, haar_ensemble
from linalg.codec import matrix_from_json, matrix_to_json
from linalg.errors import InvalidInputError


def ensemble_to_json(e: UnitaryEnsemble) -> Dict[str, Any]:
    if not e.is_discrete:
        return {"dim": e.dim, "kind": "haar"}
    return {
        "dim": e.dim,
        "kind": "discrete",
        "name": e.name,
        "probabilities": [float(p) for p in e.probabilities],
        "unitaries": [matrix_to_json(m) for m in e.matrices],
    }


def ensemble_from_json(obj: Dict[str, Any]) -> UnitaryEnsemble:
    try:
        dim = int(obj["dim"])
        kind = obj["kind"]
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidInputError(f"malformed ensemble object: {e}")
    if kind == "haar":
        if "unitaries" in obj:
            raise InvalidInputError("a haar ensemble carries no matrices")
        return haar_ensemble(dim)
    if kind != "discrete":
        raise InvalidInputError(f"unknown ensemble kind '{kind}'")
    mats = [matrix_from_json(m) for m in obj.get("unitaries", [])]
    for i, m in enumerate(mats):
        if m.shape != (dim, dim):
            raise InvalidInputError(f"unitary {i} has shape {m.shape}, ensemble declares dim={dim}")
    return discrete_ensemble(mats, obj.get("probabilities"), name=obj.get("name", "file"))


def load_ensemble(path: Union[str, Path]) -> UnitaryEnsemble:
    p = Path(path)
    try:
        obj = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"{p} is not valid JSON: {e}")
    return ensemble_from_json(obj)
