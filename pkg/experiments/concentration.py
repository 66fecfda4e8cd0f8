"""Empirical concentration of (1/N) sum_i tr(U_i P_phi U_i^dag P_psi) around 1/d."""
from __future__ import annotations

import time
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ensembles.haar import sample_haar_batch
from ensembles.rng import SAMPLE_STREAM, stream
from experiments.records import ExperimentRecord, write_outputs
from experiments.stats import non_increasing, ols_fit
from linalg.errors import InvalidInputError, InvalidParameterError
from runtime.pool import run_trials
from runtime.settings import Settings, default_settings, load_settings_from_yaml


def _unit(v, d: int) -> np.ndarray:
    x = np.asarray(v, dtype=np.complex128).reshape(-1)
    if x.shape[0] != d or np.linalg.norm(x) == 0:
        raise InvalidInputError(f"expected a non-zero vector of length {d}")
    return x / np.linalg.norm(x)


def run_concentration(
    d: int,
    n_list: Sequence[int],
    delta: float,
    trials: int,
    seed: int,
    settings: Optional[Settings] = None,
    threads: Optional[int] = None,
    phi=None,
    psi=None,
) -> ExperimentRecord:
    """Failure frequency of |mean - 1/d| >= delta/d over Haar draws, per N.

    Cells without failures are censored: they report the upper bound
    1/trials and stay out of the log-frequency fit.
    """
    if not 0.0 < delta < 1.0:
        raise InvalidParameterError(f"delta must satisfy 0 < delta < 1, got {delta}")
    if trials < 1:
        raise InvalidParameterError(f"trials must be >= 1, got {trials}")
    settings = settings or default_settings()
    settings.check_caps(d=d)
    for n in n_list:
        if n < 1:
            raise InvalidParameterError(f"N must be >= 1, got {n}")
        settings.check_caps(n=n)
    e0 = np.zeros(d, dtype=np.complex128)
    e0[0] = 1.0
    phi = _unit(e0 if phi is None else phi, d)
    psi = _unit(e0 if psi is None else psi, d)
    started = time.perf_counter()

    rows: List[Dict[str, Any]] = []
    cells: List[Dict[str, Any]] = []
    for n in n_list:

        def trial(t: int, n: int = n) -> Dict[str, Any]:
            U = sample_haar_batch(d, n, stream(seed, SAMPLE_STREAM, d, n, t))
            value = float(np.mean(np.abs((U @ phi) @ psi.conj()) ** 2))
            return {"n": n, "trial": t, "value": value, "failure": bool(abs(value - 1.0 / d) >= delta / d)}

        results = run_trials(trial, trials, threads=threads)
        rows += results
        failures = sum(r["failure"] for r in results)
        freq = failures / trials
        censored = failures == 0
        cells.append(
            {
                "n": n,
                "failures": failures,
                "trials": trials,
                "frequency": freq,
                "stderr": float(np.sqrt(freq * (1.0 - freq) / trials)),
                "censored": censored,
                "upper_bound": 1.0 / trials if censored else None,
            }
        )
        print(f"[concentration] d={d} N={n} failures={failures}/{trials}")

    ordered = sorted(cells, key=lambda c: c["n"])
    fit_cells = [c for c in ordered if not c["censored"]]
    slope = intercept = fitted_c = None
    if len({c["n"] for c in fit_cells}) >= 2:
        slope, intercept = ols_fit([c["n"] for c in fit_cells], [np.log(c["frequency"]) for c in fit_cells])
        fitted_c = -slope / delta ** 2
    summary = {
        "slope": slope,
        "intercept": intercept,
        "fitted_c": fitted_c,
        "monotonic": non_increasing([c["frequency"] for c in ordered], [c["stderr"] for c in ordered]),
        "censored_cells": [c["n"] for c in ordered if c["censored"]],
    }
    return ExperimentRecord(
        kind="concentration",
        params={
            "d": d,
            "n_list": list(n_list),
            "delta": delta,
            "trials": trials,
            "seed": seed,
            "phi": [[float(z.real), float(z.imag)] for z in phi],
            "psi": [[float(z.real), float(z.imag)] for z in psi],
        },
        rows=rows,
        cells=cells,
        summary=summary,
        settings=settings.as_dict(),
        run_info={
            "wall_seconds": time.perf_counter() - started,
            "timestamp": datetime.now(timezone.utc).isoformat(),
        },
    )


def run(config: Dict[str, Any]) -> ExperimentRecord:
    settings = load_settings_from_yaml(config.get("settings_path"))
    record = run_concentration(
        d=int(config["d"]),
        n_list=config["n_list"],
        delta=float(config["delta"]),
        trials=int(config.get("trials", settings.concentration_trials)),
        seed=int(config["seed"]),
        settings=settings,
        threads=config.get("threads", settings.threads),
    )
    write_outputs(record, config.get("out"), config.get("format", "json"), config.get("plot"))
    return record
