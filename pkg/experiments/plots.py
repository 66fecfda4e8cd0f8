"""Standalone SVG charts for experiment records."""
from __future__ import annotations

from pathlib import Path
from typing import Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from experiments.records import ExperimentRecord  # noqa: E402

RC = {
    "figure.figsize": (5.0, 3.2),
    "font.size": 9,
    "axes.linewidth": 0.5,
    "lines.linewidth": 1.0,
    "svg.hashsalt": "randomizing",  # stable element ids across runs
}


def _scaling(ax, record: ExperimentRecord) -> None:
    for d in sorted({c["d"] for c in record.cells}):
        cells = sorted(
            (c for c in record.cells if c["d"] == d and not c["skipped"] and c["draw"] == "iid"),
            key=lambda c: c["n"],
        )
        if not cells:
            continue
        ns = np.array([c["n"] for c in cells], dtype=float)
        ax.errorbar(ns, [c["mean"] for c in cells], yerr=[c["stderr"] for c in cells], marker="o", label=f"d={d}")
        ref = cells[0]["mean"] * np.sqrt(ns[0] / ns)
        ax.plot(ns, ref, ls="--", lw=0.5, color="gray")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("N")
    ax.set_ylabel("mean estimated deviation")
    ax.legend(frameon=False)


def _coupon(ax, record: ExperimentRecord) -> None:
    draws = [r["draws"] for r in record.rows]
    ax.hist(draws, bins="auto", color="0.6")
    ax.axvline(record.summary["oracle"], color="k", lw=0.8, label="d H_d")
    ax.set_xlabel("draws until full rank")
    ax.set_ylabel("trials")
    ax.legend(frameon=False)


def _concentration(ax, record: ExperimentRecord) -> None:
    cells = sorted(record.cells, key=lambda c: c["n"])
    seen = [c for c in cells if not c["censored"]]
    censored = [c for c in cells if c["censored"]]
    ax.plot([c["n"] for c in seen], [c["frequency"] for c in seen], marker="o", label="failure frequency")
    if censored:
        ax.plot([c["n"] for c in censored], [c["upper_bound"] for c in censored], "v", color="gray", label="upper bound")
    ax.set_yscale("log")
    ax.set_xlabel("N")
    ax.set_ylabel("P(|mean - 1/d| >= delta/d)")
    ax.legend(frameon=False)


def plot_record(record: ExperimentRecord, path: Union[str, Path]) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    draw = {"scaling": _scaling, "coupon": _coupon, "concentration": _concentration}[record.kind]
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        draw(ax, record)
        fig.tight_layout()
        fig.savefig(p, format="svg", metadata={"Date": None})
        plt.close(fig)
    print(f"[records] plot {p}")
    return p
