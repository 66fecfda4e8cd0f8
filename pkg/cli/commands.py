"""Batch command-line front end.

Exit status: 0 success, 2 usage or validation error, 1 runtime error,
3 when ``certify`` ends refuted or heuristic_fail.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from certification.certify import CertifyParams, certify_randomizing
from certification.planner import (
    NetPlan,
    constant_rule_sample_size,
    coupon_lower_bound,
    plan_net,
    polylog_sample_size,
    union_failure_bound,
    union_sample_size,
)
from channels.codec import load_channel, save_channel
from channels.kraus import KrausChannel, make_uniform_channel
from ensembles.families import UnitaryEnsemble, resolve_ensemble
from ensembles.isotropy import EXACT_MAX_DIM, check_isotropy_exact, check_isotropy_sampled
from ensembles.rng import SAMPLE_STREAM, stream
from experiments.concentration import run_concentration
from experiments.coupon import run_coupon
from experiments.records import write_model, write_outputs
from experiments.scaling import run_scaling_scan
from linalg.errors import RandomizingError
from runtime.settings import Settings, load_settings_from_yaml

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_VERDICT = 3

SUBCOMMANDS = ("sample", "check-isotropy", "certify", "scan", "coupon", "concentration", "plan-net")
RANDOMIZED = {"sample", "certify", "scan", "coupon", "concentration"}
EXPERIMENTS = {"scan", "coupon", "concentration"}


class UsageError(Exception):
    pass


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    subcommand: Literal["sample", "check-isotropy", "certify", "scan", "coupon", "concentration", "plan-net"]
    d: Optional[int] = Field(None, ge=1)
    d_list: Optional[List[int]] = None
    n: Optional[int] = Field(None, ge=1)
    n_list: Optional[List[int]] = None
    epsilon: Optional[float] = Field(None, gt=0, lt=1)
    delta: Optional[float] = Field(None, gt=0, lt=2)
    ensemble: str = "haar"
    qubits: Optional[int] = Field(None, ge=1)
    seed: Optional[int] = Field(None, ge=0)
    trials: Optional[int] = Field(None, ge=1)
    method: Literal["net", "estimator", "both"] = "both"
    draw: Literal["auto", "iid", "family"] = "auto"
    mode: Literal["auto", "exact", "sampled"] = "auto"
    samples: int = Field(100_000, ge=100)
    channel: Optional[str] = None
    restarts: Optional[int] = Field(None, ge=1)
    max_iters: Optional[int] = Field(None, ge=1)
    probes: Optional[int] = Field(None, ge=1)
    include_family: bool = False
    cross_check: bool = False
    plot: Optional[str] = None
    out: Optional[str] = None
    format: Optional[Literal["json", "csv"]] = None
    threads: Optional[int] = Field(None, ge=1)
    config: Optional[str] = None

    @model_validator(mode="after")
    def _check(self) -> "RunConfig":
        needs_seed = self.subcommand in RANDOMIZED
        if self.subcommand == "certify" and self.channel and self.method == "net":
            needs_seed = False
        if self.subcommand == "check-isotropy" and self.mode == "sampled":
            needs_seed = True
        if needs_seed and self.seed is None:
            raise ValueError(f"{self.subcommand} is randomized; pass --seed <int>")
        if self.format is None:
            self.format = "csv" if self.out and self.out.lower().endswith(".csv") else "json"
        if self.format == "csv" and self.subcommand not in EXPERIMENTS:
            raise ValueError(f"--format csv is only available for {', '.join(sorted(EXPERIMENTS))}")
        for name in ("d_list", "n_list"):
            values = getattr(self, name)
            if values is not None and (not values or min(values) < 1):
                raise ValueError(f"{name} needs positive integers")
        if self.out is None:
            self.out = str(Path("data") / f"{self.subcommand}.{self.format}")
        return self

    def check_caps(self, settings: Settings) -> None:
        for d in [self.d, *(self.d_list or [])]:
            if d is not None:
                settings.check_caps(d=d)
        for n in [self.n, *(self.n_list or [])]:
            if n is not None:
                settings.check_caps(n=n)
        if self.qubits is not None:
            settings.check_caps(d=2 ** self.qubits)


# -------- argument parsing --------

def _common(p: argparse.ArgumentParser, formats: bool = False) -> None:
    p.add_argument("--config", default=None, help="YAML settings file (defaults: configs/defaults.yaml)")
    p.add_argument("--threads", type=int, default=None, help="worker cap; default is machine parallelism")
    p.add_argument("--out", default=None, help="output path; default data/<subcommand>.<format>")
    p.add_argument(
        "--format",
        choices=("json", "csv") if formats else ("json",),
        default=None,
        help="output format; inferred from the --out suffix when omitted",
    )


def _ensemble_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ensemble", default="haar", help="haar | fourier | pauli | file:<path>")
    p.add_argument("--qubits", type=int, default=None, help="qubit count k for --ensemble pauli (d = 2^k)")


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(
        prog="main_randomize.py",
        description="Random unitary channels: sampling, isotropy, eps-randomizing certification and experiments.",
        formatter_class=fmt,
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("sample", help="draw N unitaries and write the channel JSON", formatter_class=fmt)
    p.add_argument("--d", type=int, default=None, help="dimension")
    p.add_argument("--n", type=int, required=True, help="number of Kraus unitaries N")
    p.add_argument("--seed", type=int, default=None, help="master seed (required)")
    p.add_argument("--draw", choices=("auto", "iid", "family"), default="auto", help="i.i.d. draws or the complete family")
    _ensemble_args(p)
    _common(p)

    p = sub.add_parser("check-isotropy", help="second-moment isotropy check of an ensemble", formatter_class=fmt)
    p.add_argument("--d", type=int, default=None, help="dimension")
    p.add_argument("--mode", choices=("auto", "exact", "sampled"), default="auto", help="exact needs a discrete ensemble with d <= 16")
    p.add_argument("--samples", type=int, default=100_000, help="Monte Carlo samples for the sampled check")
    p.add_argument("--seed", type=int, default=None, help="master seed (required when sampling)")
    _ensemble_args(p)
    _common(p)

    p = sub.add_parser("certify", help="decide whether a channel is eps-randomizing", formatter_class=fmt)
    p.add_argument("--d", type=int, default=None, help="dimension")
    p.add_argument("--n", type=int, default=None, help="number of Kraus unitaries N")
    p.add_argument("--eps", dest="epsilon", type=float, required=True, help="epsilon in (0, 1)")
    p.add_argument("--seed", type=int, default=None, help="master seed")
    p.add_argument("--method", choices=("net", "estimator", "both"), default="both", help="bounds to compute")
    p.add_argument("--draw", choices=("auto", "iid", "family"), default="auto", help="i.i.d. draws or the complete family")
    p.add_argument("--channel", default=None, help="Channel JSON to certify instead of sampling")
    p.add_argument("--delta", type=float, default=None, help="net covering radius (settings: net.delta)")
    p.add_argument("--restarts", type=int, default=None, help="estimator restarts (settings: estimator.restarts)")
    p.add_argument("--max-iters", dest="max_iters", type=int, default=None, help="estimator iteration cap (settings: estimator.max_iters)")
    p.add_argument("--probes", type=int, default=None, help="probe count for heuristic nets (settings: net.probes)")
    _ensemble_args(p)
    _common(p)

    p = sub.add_parser("scan", help="deviation versus N scaling scan", formatter_class=fmt)
    p.add_argument("--d", dest="d_list", type=int, nargs="+", required=True, help="dimensions")
    p.add_argument("--n", dest="n_list", type=int, nargs="+", required=True, help="Kraus counts N")
    p.add_argument("--trials", type=int, default=None, help="trials per cell (settings: trials.scaling)")
    p.add_argument("--seed", type=int, default=None, help="master seed (required)")
    p.add_argument("--include-family", dest="include_family", action="store_true", help="add the complete family as a deterministic cell")
    p.add_argument("--plot", default=None, help="SVG chart path")
    _ensemble_args(p)
    _common(p, formats=True)

    p = sub.add_parser("coupon", help="draws from the Fourier-Weyl family until Phi(P_x0) has full rank", formatter_class=fmt)
    p.add_argument("--d", type=int, required=True, help="dimension")
    p.add_argument("--trials", type=int, default=None, help="trials (settings: trials.coupon)")
    p.add_argument("--seed", type=int, default=None, help="master seed (required)")
    p.add_argument("--cross-check", dest="cross_check", action="store_true", help="verify the rank transition on the channel itself (d <= 16)")
    p.add_argument("--plot", default=None, help="SVG histogram path")
    _common(p, formats=True)

    p = sub.add_parser("concentration", help="failure frequency of the averaged overlap", formatter_class=fmt)
    p.add_argument("--d", type=int, required=True, help="dimension")
    p.add_argument("--n", dest="n_list", type=int, nargs="+", required=True, help="Kraus counts N")
    p.add_argument("--delta", type=float, required=True, help="relative deviation delta in (0, 1)")
    p.add_argument("--trials", type=int, default=None, help="trials per N (settings: trials.concentration)")
    p.add_argument("--seed", type=int, default=None, help="master seed (required)")
    p.add_argument("--plot", default=None, help="SVG chart path")
    _common(p, formats=True)

    p = sub.add_parser("plan-net", help="net sizes and sample-size rules for a certification run", formatter_class=fmt)
    p.add_argument("--d", type=int, required=True, help="dimension")
    p.add_argument("--delta", type=float, default=None, help="net covering radius (settings: net.delta)")
    p.add_argument("--eps", dest="epsilon", type=float, default=None, help="epsilon for sample-size rules")
    _common(p)
    return parser


# -------- handlers --------

def _resolve(cfg: RunConfig, settings: Settings) -> UnitaryEnsemble:
    try:
        return resolve_ensemble(cfg.ensemble, cfg.d, cfg.qubits, max_dim=settings.max_dim)
    except RandomizingError as e:
        raise UsageError(str(e))


def _draw(ens: UnitaryEnsemble, cfg: RunConfig, settings: Settings) -> KrausChannel:
    if cfg.n is None:
        raise UsageError("--n is required when sampling a channel")
    family = ens.is_discrete and cfg.draw == "family"
    if cfg.draw == "auto":
        family = ens.is_discrete and ens.is_uniform and cfg.n == ens.size
    if family:
        if cfg.n != ens.size:
            raise UsageError(f"--draw family takes all {ens.size} elements; got --n {cfg.n}")
        print(f"[cli] using the complete {ens.name} family ({ens.size} elements)")
        return make_uniform_channel(ens.family(), tol=settings.unitary_tol)
    if cfg.draw == "family":
        raise UsageError(f"ensemble '{ens.name}' has no finite family")
    draws = ens.sample(cfg.n, stream(cfg.seed, SAMPLE_STREAM))
    return make_uniform_channel(draws, tol=settings.unitary_tol)


def _sample(cfg: RunConfig, settings: Settings) -> int:
    channel = _draw(_resolve(cfg, settings), cfg, settings)
    save_channel(channel, cfg.out)
    print(f"[cli] wrote channel d={channel.dim} N={channel.n} to {cfg.out}")
    return EXIT_OK


def _check_isotropy(cfg: RunConfig, settings: Settings) -> int:
    ens = _resolve(cfg, settings)
    mode = cfg.mode
    if mode == "auto":
        mode = "exact" if ens.is_discrete and ens.dim <= EXACT_MAX_DIM else "sampled"
    if mode == "exact":
        if not ens.is_discrete or ens.dim > EXACT_MAX_DIM:
            raise UsageError(f"exact isotropy needs a discrete ensemble with d <= {EXACT_MAX_DIM}")
        report = check_isotropy_exact(ens)
    else:
        if cfg.seed is None:
            raise UsageError("the sampled check is randomized; pass --seed <int>")
        report = check_isotropy_sampled(ens, cfg.samples, stream(cfg.seed, SAMPLE_STREAM))
    print(f"[cli] isotropy {report.mode} max_deviation={report.max_deviation:.3e}")
    write_model(report, cfg.out)
    return EXIT_OK


def _certify(cfg: RunConfig, settings: Settings) -> int:
    if cfg.method != "estimator" and cfg.delta is not None and cfg.delta >= 0.5:
        raise UsageError("the net bound needs --delta < 0.5")
    if cfg.channel:
        try:
            channel = load_channel(cfg.channel)
        except (RandomizingError, OSError) as e:
            raise UsageError(f"cannot load --channel: {e}")
        if cfg.d is not None and cfg.d != channel.dim:
            raise UsageError(f"--d {cfg.d} does not match the channel dimension {channel.dim}")
        settings.check_caps(d=channel.dim, n=channel.n)
        if channel.dim >= 3 and cfg.seed is None:
            raise UsageError(f"d={channel.dim} uses a randomized heuristic net; pass --seed <int>")
        name = f"file:{cfg.channel}"
    else:
        ens = _resolve(cfg, settings)
        channel = _draw(ens, cfg, settings)
        name = ens.name
    params = CertifyParams.from_settings(
        settings,
        restarts=cfg.restarts,
        max_iters=cfg.max_iters,
        net_delta=cfg.delta,
        net_probes=cfg.probes,
        threads=cfg.threads,
    )
    report = certify_randomizing(
        channel,
        cfg.epsilon,
        method=cfg.method,
        params=params,
        seed=cfg.seed,
        ensemble=name,
        settings=settings,
    )
    write_model(report, cfg.out)
    return EXIT_OK if report.verdict in ("certified", "heuristic_pass") else EXIT_VERDICT


def _scan(cfg: RunConfig, settings: Settings) -> int:
    if cfg.ensemble not in ("haar", "fourier", "pauli") and not cfg.ensemble.startswith("file:"):
        raise UsageError(f"unknown ensemble '{cfg.ensemble}'; expected haar, fourier, pauli or file:<path>")
    record = run_scaling_scan(
        cfg.ensemble,
        cfg.d_list,
        cfg.n_list,
        trials=cfg.trials or settings.scaling_trials,
        seed=cfg.seed,
        settings=settings,
        threads=cfg.threads,
        include_family=cfg.include_family,
        qubits=cfg.qubits,
    )
    write_outputs(record, cfg.out, cfg.format, cfg.plot)
    return EXIT_OK


def _coupon(cfg: RunConfig, settings: Settings) -> int:
    if cfg.d < 2:
        raise UsageError("coupon needs --d >= 2")
    record = run_coupon(
        cfg.d,
        trials=cfg.trials or settings.coupon_trials,
        seed=cfg.seed,
        settings=settings,
        threads=cfg.threads,
        cross_check=cfg.cross_check,
    )
    write_outputs(record, cfg.out, cfg.format, cfg.plot)
    return EXIT_OK


def _concentration(cfg: RunConfig, settings: Settings) -> int:
    if not 0.0 < cfg.delta < 1.0:
        raise UsageError("concentration needs 0 < --delta < 1")
    record = run_concentration(
        cfg.d,
        cfg.n_list,
        cfg.delta,
        trials=cfg.trials or settings.concentration_trials,
        seed=cfg.seed,
        settings=settings,
        threads=cfg.threads,
    )
    write_outputs(record, cfg.out, cfg.format, cfg.plot)
    return EXIT_OK


class PlanReport(BaseModel):
    net: NetPlan
    epsilon: Optional[float] = None
    sample_sizes: Dict[str, Any] = Field(default_factory=dict)


def _plan_net(cfg: RunConfig, settings: Settings) -> int:
    delta = cfg.delta if cfg.delta is not None else settings.net_delta
    if not 0.0 < delta < 1.0:
        raise UsageError("plan-net needs 0 < --delta < 1")
    plan = plan_net(cfg.d, delta, settings.max_net_size)
    report = PlanReport(net=plan, epsilon=cfg.epsilon)
    if cfg.epsilon is not None:
        sizes: Dict[str, Any] = {
            "constant_rule": constant_rule_sample_size(cfg.d, cfg.epsilon),
            "polylog_rule": polylog_sample_size(cfg.d, cfg.epsilon),
            "coupon_floor": coupon_lower_bound(cfg.d),
        }
        if delta < 0.5:
            n_union = union_sample_size(cfg.d, cfg.epsilon, delta=delta)
            sizes["union_bound"] = n_union
            sizes["union_failure_at_constant_rule"] = union_failure_bound(
                cfg.d, cfg.epsilon, sizes["constant_rule"], delta=delta
            )
        report.sample_sizes = sizes
    flag = "feasible" if plan.feasible else "infeasible"
    print(f"[cli] plan-net d={cfg.d} delta={delta} log10_bound={plan.log10_bound:.2f} {flag}")
    write_model(report, cfg.out)
    return EXIT_OK


HANDLERS: Dict[str, Callable[[RunConfig, Settings], int]] = {
    "sample": _sample,
    "check-isotropy": _check_isotropy,
    "certify": _certify,
    "scan": _scan,
    "coupon": _coupon,
    "concentration": _concentration,
    "plan-net": _plan_net,
}


def _one_line(e: Exception) -> str:
    if isinstance(e, ValidationError):
        err = e.errors()[0]
        loc = ".".join(str(x) for x in err["loc"])
        return f"{loc}: {err['msg']}" if loc else err["msg"]
    return str(e).splitlines()[0] if str(e) else type(e).__name__


def parse_and_dispatch(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    raw = {k: v for k, v in vars(args).items() if v is not None}
    try:
        settings = load_settings_from_yaml(args.config)
        cfg = RunConfig(**raw)
        cfg.check_caps(settings)
    except (ValidationError, RandomizingError, ValueError, OSError) as e:
        print(f"[cli] error: {_one_line(e)}", file=sys.stderr)
        return EXIT_USAGE

    try:
        return HANDLERS[cfg.subcommand](cfg, settings)
    except UsageError as e:
        print(f"[cli] error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (RandomizingError, OSError) as e:
        print(f"[cli] failed: {_one_line(e)}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(parse_and_dispatch())
