"""Scaling scan: sup-norm deviation of N-unitary channels against N.

For i.i.d. isotropic draws the deviation is expected to follow the
envelope M ~ K sqrt(d / N), i.e. a log-log slope of -1/2 at fixed d.
"""
from __future__ import annotations

import time
import warnings
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from certification.estimator import estimate_sup
from channels.kraus import make_uniform_channel
from ensembles.families import UnitaryEnsemble, resolve_ensemble
from ensembles.rng import ESTIMATOR_STREAM, SAMPLE_STREAM, stream
from experiments.records import ExperimentRecord, write_outputs
from experiments.stats import non_increasing, ols_fit, summarize
from linalg.errors import InvalidParameterError, RandomizingError
from runtime.pool import run_trials
from runtime.settings import Settings, default_settings, load_settings_from_yaml


def _estimate(settings: Settings, channel, seed: int, *keys: int):
    return estimate_sup(
        channel,
        **settings.estimator_params(),
        rng=stream(seed, ESTIMATOR_STREAM, *keys),
        threads=1,
    )


def _skip(d: int, n: Optional[int], reason: str) -> Dict[str, Any]:
    msg = f"skipping cell d={d} N={n}: {reason}"
    warnings.warn(msg, RuntimeWarning)
    print(f"[scan] {msg}")
    return {"d": d, "n": n, "draw": "iid", "skipped": True, "reason": reason}


def _fit_dimension(d: int, cells: List[Dict[str, Any]]) -> Dict[str, Any]:
    usable = sorted(
        (c for c in cells if c["d"] == d and not c["skipped"] and c["draw"] == "iid" and c["mean"] > 0),
        key=lambda c: c["n"],
    )
    fit: Dict[str, Any] = {"d": d, "cells": len(usable), "slope": None, "intercept": None}
    if not usable:
        fit.update(prefactor=None, monotonic=None)
        return fit
    ns = np.array([c["n"] for c in usable], dtype=float)
    means = np.array([c["mean"] for c in usable])
    fit["prefactor"] = float(np.exp(np.mean(np.log(means) - 0.5 * np.log(d / ns))))
    fit["monotonic"] = non_increasing(list(means), [c["stderr"] for c in usable])
    if np.unique(ns).size >= 2:
        fit["slope"], fit["intercept"] = ols_fit(np.log(ns), np.log(means))
    return fit


def run_scaling_scan(
    ensemble: Union[str, UnitaryEnsemble],
    d_list: Sequence[int],
    n_list: Sequence[int],
    trials: int,
    seed: int,
    settings: Optional[Settings] = None,
    threads: Optional[int] = None,
    include_family: bool = False,
    qubits: Optional[int] = None,
) -> ExperimentRecord:
    """Estimate M = A for ``trials`` channels per (d, N) cell.

    ``ensemble`` is a name resolved per dimension or a fixed ensemble, in which
    case cells with another dimension are skipped. Cells over the resource
    caps become skip markers.
    """
    if trials < 1:
        raise InvalidParameterError(f"trials must be >= 1, got {trials}")
    settings = settings or default_settings()
    started = time.perf_counter()
    name = ensemble if isinstance(ensemble, str) else ensemble.name

    rows: List[Dict[str, Any]] = []
    cells: List[Dict[str, Any]] = []
    for d in d_list:
        if isinstance(ensemble, str):
            try:
                ens = resolve_ensemble(ensemble, d, qubits, max_dim=settings.max_dim)
            except RandomizingError as e:
                cells += [_skip(d, n, str(e)) for n in n_list]
                continue
        elif ensemble.dim != d:
            cells += [_skip(d, n, f"ensemble acts on d={ensemble.dim}") for n in n_list]
            continue
        else:
            ens = ensemble

        for n in n_list:
            if n < 1 or n > settings.max_n or d > settings.max_dim:
                cells.append(_skip(d, n, f"outside caps (d <= {settings.max_dim}, 1 <= N <= {settings.max_n})"))
                continue

            def trial(t: int, d: int = d, n: int = n, ens: UnitaryEnsemble = ens) -> Dict[str, Any]:
                draws = ens.sample(n, stream(seed, SAMPLE_STREAM, d, n, t))
                est = _estimate(settings, make_uniform_channel(draws, tol=settings.unitary_tol), seed, d, n, t)
                return {"d": d, "n": n, "draw": "iid", "trial": t, "estimate": est.value, "converged": est.converged}

            results = run_trials(trial, trials, threads=threads)
            rows += results
            s = summarize([r["estimate"] for r in results])
            cells.append({"d": d, "n": n, "draw": "iid", "skipped": False, **s.model_dump()})
            print(f"[scan] d={d} N={n} mean={s.mean:.6g} stderr={s.stderr:.3g}")

        if include_family and ens.is_discrete:
            n = ens.size
            if n > settings.max_n:
                cells.append(_skip(d, n, "full family exceeds max_n"))
            else:
                est = _estimate(settings, make_uniform_channel(ens.family(), tol=settings.unitary_tol), seed, d, n, 0)
                rows.append({"d": d, "n": n, "draw": "family", "trial": 0, "estimate": est.value, "converged": est.converged})
                s = summarize([est.value])
                cells.append({"d": d, "n": n, "draw": "family", "skipped": False, **s.model_dump()})
                print(f"[scan] d={d} full family N={n} estimate={est.value:.3g}")

    fits = [_fit_dimension(d, cells) for d in sorted(set(d_list))]
    summary = {
        "fits": fits,
        "skipped_cells": sum(1 for c in cells if c["skipped"]),
        "envelope": "M ~ K sqrt(d/N)",
    }
    return ExperimentRecord(
        kind="scaling",
        params={
            "ensemble": name,
            "d_list": list(d_list),
            "n_list": list(n_list),
            "trials": trials,
            "seed": seed,
            "include_family": include_family,
            "qubits": qubits,
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
    """Entry point used by main_experiments.py."""
    settings = load_settings_from_yaml(config.get("settings_path"))
    record = run_scaling_scan(
        ensemble=config.get("ensemble", "haar"),
        d_list=config["d_list"],
        n_list=config["n_list"],
        trials=int(config.get("trials", settings.scaling_trials)),
        seed=int(config["seed"]),
        settings=settings,
        threads=config.get("threads", settings.threads),
        include_family=bool(config.get("include_family", False)),
        qubits=config.get("qubits"),
    )
    write_outputs(record, config.get("out"), config.get("format", "json"), config.get("plot"))
    return record
