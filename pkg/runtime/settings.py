"""Shared numerical settings.

Every command reads its tolerances, estimator defaults and resource caps from
a ``Settings`` instance. Values come from ``configs/defaults.yaml`` when it
exists and fall back to the module-level defaults below otherwise.
"""
from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from linalg.errors import ResourceLimitError

TOOL_VERSION = "0.3.0"
RECORD_FORMAT_VERSION = 1

# -------- DEFAULT CONFIG --------
DEFAULT_CONFIG_PATH = Path(__file__).resolve().parents[1] / "configs" / "defaults.yaml"

EIG_TOL_DEFAULT = 1e-9
HERM_TOL_DEFAULT = 1e-9
UNITARY_TOL_DEFAULT = 1e-9
RANK_TOL_DEFAULT = 1e-8

RESTARTS_DEFAULT = 32
MAX_ITERS_DEFAULT = 200
CONV_TOL_DEFAULT = 1e-10

NET_DELTA_DEFAULT = 0.25
NET_PROBES_DEFAULT = 100_000

MAX_DIM_DEFAULT = 64
MAX_N_DEFAULT = 20_000
MAX_NET_SIZE_DEFAULT = 100_000

SCALING_TRIALS_DEFAULT = 20
COUPON_TRIALS_DEFAULT = 200
CONCENTRATION_TRIALS_DEFAULT = 2000


class Settings:
    def __init__(self, raw: Dict[str, Any]):
        self.eig_tol: float = float(raw.get("eig_tol", EIG_TOL_DEFAULT))
        self.herm_tol: float = float(raw.get("herm_tol", HERM_TOL_DEFAULT))
        self.unitary_tol: float = float(raw.get("unitary_tol", UNITARY_TOL_DEFAULT))
        self.rank_tol: float = float(raw.get("rank_tol", RANK_TOL_DEFAULT))

        estimator = raw.get("estimator") or {}
        self.restarts: int = int(estimator.get("restarts", RESTARTS_DEFAULT))
        self.max_iters: int = int(estimator.get("max_iters", MAX_ITERS_DEFAULT))
        self.conv_tol: float = float(estimator.get("conv_tol", CONV_TOL_DEFAULT))

        net = raw.get("net") or {}
        self.net_delta: float = float(net.get("delta", NET_DELTA_DEFAULT))
        self.net_probes: int = int(net.get("probes", NET_PROBES_DEFAULT))

        caps = raw.get("caps") or {}
        self.max_dim: int = int(caps.get("max_dim", MAX_DIM_DEFAULT))
        self.max_n: int = int(caps.get("max_n", MAX_N_DEFAULT))
        self.max_net_size: int = int(caps.get("max_net_size", MAX_NET_SIZE_DEFAULT))

        trials = raw.get("trials") or {}
        self.scaling_trials: int = int(trials.get("scaling", SCALING_TRIALS_DEFAULT))
        self.coupon_trials: int = int(trials.get("coupon", COUPON_TRIALS_DEFAULT))
        self.concentration_trials: int = int(trials.get("concentration", CONCENTRATION_TRIALS_DEFAULT))

        threads = raw.get("threads")
        self.threads: Optional[int] = int(threads) if threads is not None else None

    def check_caps(
        self,
        d: Optional[int] = None,
        n: Optional[int] = None,
    ) -> None:
        """Raise ``ResourceLimitError`` when a size exceeds the configured caps."""
        if d is not None and d > self.max_dim:
            raise ResourceLimitError(f"dimension d={d} exceeds cap max_dim={self.max_dim}")
        if n is not None and n > self.max_n:
            raise ResourceLimitError(f"Kraus count N={n} exceeds cap max_n={self.max_n}")

    def estimator_params(self) -> Dict[str, Any]:
        """Keyword arguments for certification.estimator.estimate_sup."""
        return {
            "restarts": self.restarts,
            "max_iters": self.max_iters,
            "conv_tol": self.conv_tol,
            "herm_tol": self.herm_tol,
            "eig_tol": self.eig_tol,
        }

    def as_dict(self) -> Dict[str, Any]:
        """Flat view printed into reports for audit."""
        return {
            "eig_tol": self.eig_tol,
            "herm_tol": self.herm_tol,
            "unitary_tol": self.unitary_tol,
            "rank_tol": self.rank_tol,
            "restarts": self.restarts,
            "max_iters": self.max_iters,
            "conv_tol": self.conv_tol,
            "net_delta": self.net_delta,
            "net_probes": self.net_probes,
            "max_dim": self.max_dim,
            "max_n": self.max_n,
            "max_net_size": self.max_net_size,
        }


def load_settings_from_yaml(config_path: Optional[str] = None) -> Settings:
    """Build settings from a YAML file, or from defaults when it is absent.

    With ``config_path=None`` the repository's ``configs/defaults.yaml`` is
    used if present.
    """
    raw: Dict[str, Any] = {}
    p = Path(config_path) if config_path else DEFAULT_CONFIG_PATH
    if p.exists():
        with p.open("r", encoding="utf-8") as f:
            loaded = yaml.safe_load(f) or {}
            if not isinstance(loaded, dict):
                raise ValueError(f"Config at {p} must be a mapping.")
            raw.update(loaded)
    elif config_path:
        raise FileNotFoundError(f"Config file not found: {config_path}")
    return Settings(raw)


_DEFAULT_SETTINGS: Optional[Settings] = None


def default_settings() -> Settings:
    """Process-wide settings loaded lazily from the default config path."""
    global _DEFAULT_SETTINGS
    if _DEFAULT_SETTINGS is None:
        _DEFAULT_SETTINGS = load_settings_from_yaml(None)
    return _DEFAULT_SETTINGS
