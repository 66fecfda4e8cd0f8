#!/usr/bin/env python3
"""Run the experiment presets listed in configs/experiments.yaml.

Each preset names a module exposing ``run(config)`` and the config dict
passed to it. Disabled presets are skipped; a failing preset is reported
and the remaining ones still run.

    python main_experiments.py                 # every enabled preset
    python main_experiments.py coupon_d64      # selected presets only
"""
from __future__ import annotations

import importlib
from pathlib import Path
import sys
from typing import Any, Dict, List

import yaml

ROOT = Path(__file__).resolve().parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from linalg.errors import RandomizingError


def load_presets(path: Path = ROOT / "configs" / "experiments.yaml") -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        config = yaml.safe_load(f) or {}
    return config.get("experiments", {})


def run_preset(name: str, preset: Dict[str, Any], force: bool = False) -> bool:
    if not preset.get("enabled", False) and not force:
        print(f"[experiments] {name} is disabled; skipping.")
        return True

    module_path = preset.get("module")
    if not module_path:
        print(f"[experiments] No module specified for {name}.")
        return False

    print(f"[experiments] Running {name} (module={module_path})...")
    try:
        module = importlib.import_module(module_path)
        module.run(dict(preset.get("config") or {}))
    except (RandomizingError, OSError, KeyError, ValueError) as e:
        print(f"[experiments] {name} failed: {e}")
        return False
    print(f"[experiments] {name} complete.")
    return True


def main(argv: List[str]) -> int:
    presets = load_presets()
    if not presets:
        print("[experiments] No presets found in configs/experiments.yaml.")
        return 0
    selected = argv or list(presets)
    unknown = [n for n in selected if n not in presets]
    if unknown:
        print(f"[experiments] Unknown presets: {', '.join(unknown)}")
        return 2
    ok = all([run_preset(name, presets[name], force=bool(argv)) for name in selected])
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
