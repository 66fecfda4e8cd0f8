"""Channel JSON: {"dim": d, "unitaries": [matrix, ...]}."""
from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any, Dict, Union

from channels.kraus import KrausChannel, make_uniform_channel
from linalg.codec import matrix_from_json, matrix_to_json
from linalg.errors import InvalidInputError


def channel_to_json(channel: KrausChannel) -> Dict[str, Any]:
    return {
        "dim": channel.dim,
        "unitaries": [matrix_to_json(u) for u in channel.operators],
    }


def channel_from_json(obj: Dict[str, Any]) -> KrausChannel:
    try:
        dim = int(obj["dim"])
        items = obj["unitaries"]
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidInputError(f"malformed channel object: {e}")
    mats = [matrix_from_json(m) for m in items]
    for i, m in enumerate(mats):
        if m.shape != (dim, dim):
            raise InvalidInputError(f"unitary {i} has shape {m.shape}, channel declares dim={dim}")
    return make_uniform_channel(mats)


def save_channel(channel: KrausChannel, path: Union[str, Path]) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    tmp = p.with_suffix(p.suffix + ".tmp")
    tmp.write_text(json.dumps(channel_to_json(channel)), encoding="utf-8")
    os.replace(tmp, p)
    return p


def load_channel(path: Union[str, Path]) -> KrausChannel:
    p = Path(path)
    try:
        obj = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"{p} is not valid JSON: {e}")
    return channel_from_json(obj)
