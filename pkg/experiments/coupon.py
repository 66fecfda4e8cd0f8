"""Coupon-collector lower bound on the Kraus count of randomizing channels.

Drawing U = B^j A^k uniformly from the Fourier-Weyl family sends P_x0 to
P_xj with j uniform over d residues. Phi(P_x0) is diagonal in the basis
(x_j), so it reaches full rank exactly when every residue has been drawn.
"""
from __future__ import annotations

import math
import time
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from certification.planner import coupon_lower_bound, harmonic_number
from channels.kraus import apply, make_uniform_channel
from ensembles.families import fourier_basis_vector, fourier_weyl_family
from ensembles.rng import SAMPLE_STREAM, stream
from experiments.records import ExperimentRecord, write_outputs
from experiments.stats import summarize
from linalg.core import projector
from linalg.errors import InvalidParameterError
from runtime.pool import run_trials
from runtime.settings import Settings, default_settings, load_settings_from_yaml

CROSS_CHECK_MAX_DIM = 16


def hitting_time(d: int, rng: np.random.Generator) -> Tuple[int, np.ndarray]:
    """Draws until every residue j has appeared, and the drawn family indices j*d + k."""
    batch = max(16, int(2 * d * (math.log(d) + 1)))
    drawn = np.empty(0, dtype=np.int64)
    while True:
        drawn = np.concatenate([drawn, rng.integers(0, d * d, size=batch)])
        residues, first = np.unique(drawn // d, return_index=True)
        if residues.size == d:
            hit = int(first.max()) + 1
            return hit, drawn[:hit]
        batch *= 2


def output_rank(family: np.ndarray, indices: np.ndarray, rank_tol: float) -> int:
    """Rank of Phi(P_x0) for the channel built from ``family[indices]``."""
    d = family.shape[1]
    out = apply(make_uniform_channel(family[indices]), projector(fourier_basis_vector(d, 0)))
    w = np.linalg.eigvalsh(out)
    return int(np.count_nonzero(w > rank_tol * w.max()))


def run_coupon(
    d: int,
    trials: int,
    seed: int,
    settings: Optional[Settings] = None,
    threads: Optional[int] = None,
    cross_check: bool = False,
) -> ExperimentRecord:
    if d < 2:
        raise InvalidParameterError(f"the coupon experiment needs d >= 2, got {d}")
    if trials < 1:
        raise InvalidParameterError(f"trials must be >= 1, got {trials}")
    settings = settings or default_settings()
    settings.check_caps(d=d)
    if cross_check and d > CROSS_CHECK_MAX_DIM:
        raise InvalidParameterError(f"the channel cross-check is limited to d <= {CROSS_CHECK_MAX_DIM}")
    started = time.perf_counter()
    family = fourier_weyl_family(d) if cross_check else None

    def trial(t: int) -> Dict[str, Any]:
        hit, indices = hitting_time(d, stream(seed, SAMPLE_STREAM, d, t))
        row: Dict[str, Any] = {"d": d, "trial": t, "draws": hit}
        if family is not None:
            full = output_rank(family, indices, settings.rank_tol) == d
            short = hit == 1 or output_rank(family, indices[:-1], settings.rank_tol) < d
            row["full_rank_at_hit"] = bool(full and short)
        return row

    rows: List[Dict[str, Any]] = run_trials(trial, trials, threads=threads)
    s = summarize([r["draws"] for r in rows])
    oracle = coupon_lower_bound(d)
    summary: Dict[str, Any] = {
        **s.model_dump(),
        "oracle": oracle,
        "relative_error_mean": abs(s.mean - oracle) / oracle,
        "relative_error_median": abs(s.median - oracle) / oracle,
        "floor": d * (harmonic_number(d) - 1.0),
    }
    if cross_check:
        summary["cross_check_ok"] = all(r["full_rank_at_hit"] for r in rows)
    print(f"[coupon] d={d} trials={trials} mean={s.mean:.2f} median={s.median:.1f} oracle={oracle:.2f}")
    return ExperimentRecord(
        kind="coupon",
        params={"d": d, "trials": trials, "seed": seed, "cross_check": cross_check},
        rows=rows,
        cells=[{"d": d, **s.model_dump()}],
        summary=summary,
        settings=settings.as_dict(),
        run_info={
            "wall_seconds": time.perf_counter() - started,
            "timestamp": datetime.now(timezone.utc).isoformat(),
        },
    )


def run(config: Dict[str, Any]) -> ExperimentRecord:
    settings = load_settings_from_yaml(config.get("settings_path"))
    record = run_coupon(
        d=int(config["d"]),
        trials=int(config.get("trials", settings.coupon_trials)),
        seed=int(config["seed"]),
        settings=settings,
        threads=config.get("threads", settings.threads),
        cross_check=bool(config.get("cross_check", False)),
    )
    write_outputs(record, config.get("out"), config.get("format", "json"), config.get("plot"))
    return record
