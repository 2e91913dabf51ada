"""Figure rendering for sweep reports: law ratios and deviation maxima vs noise."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import numpy as np

from .sweep import SweepRow

_RC = {
    "figure.figsize": (6.0, 6.0 * (math.sqrt(5.0) - 1.0) / 2.0),
    "figure.dpi": 110,
    "savefig.dpi": 150,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.frameon": False,
}


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    plt.rcParams.update(_RC)
    return plt


def _by_sigma(rows: Sequence[SweepRow]) -> dict[float, list[SweepRow]]:
    grouped: dict[float, list[SweepRow]] = {}
    for row in rows:
        grouped.setdefault(row.sigma_w, []).append(row)
    return dict(sorted(grouped.items()))


def _finite_ratios(rows: Sequence[SweepRow], field: str) -> list[float]:
    out = []
    for row in rows:
        if row.deficit > 0.0:
            out.append(getattr(row, field) / math.sqrt(row.deficit))
    return out


def render_sweep_figures(rows: Sequence[SweepRow], csv_path: str | Path) -> list[Path]:
    """Render the ratio and deviation figures next to the sweep CSV.

    Produces <stem>_ratios.png (dist_F / sqrt(deficit) and projection
    residual / sqrt(deficit) against sigma_w, with medians) and
    <stem>_deviations.png (medians of the four degree/measure maxima).
    """
    plt = _pyplot()
    csv_path = Path(csv_path)
    grouped = _by_sigma(rows)
    sigmas = list(grouped)
    outputs = []

    fig, ax = plt.subplots()
    for field, label, color in (
        ("frobenius_distance", "frobenius / sqrt(deficit)", "tab:blue"),
        ("projection_residual", "residual / sqrt(deficit)", "tab:red"),
    ):
        medians = []
        for sigma in sigmas:
            ratios = _finite_ratios(grouped[sigma], field)
            ax.plot(
                [sigma] * len(ratios), ratios, ".", color=color, alpha=0.35, ms=4
            )
            medians.append(np.median(ratios) if ratios else math.nan)
        ax.plot(sigmas, medians, "o-", color=color, label=label)
    if all(s > 0.0 for s in sigmas):
        ax.set_xscale("log")
    ax.set_xlabel("sigma_w")
    ax.set_ylabel("ratio")
    ax.legend()
    ratio_path = csv_path.with_name(csv_path.stem + "_ratios.png")
    fig.savefig(ratio_path, bbox_inches="tight")
    plt.close(fig)
    outputs.append(ratio_path)

    fig, ax = plt.subplots()
    all_medians = []
    for field, label in (
        ("thm37_gamma_distance", "|Gamma dist - D/2|"),
        ("thm37_degree", "|Deg - D|"),
        ("thm37_edge_degree", "|q - K/2|"),
        ("thm37_measure", "|m - 1|"),
    ):
        medians = [np.median([getattr(r, field) for r in grouped[s]]) for s in sigmas]
        all_medians.extend(medians)
        ax.plot(sigmas, medians, "o-", label=label)
    if all(s > 0.0 for s in sigmas):
        ax.set_xscale("log")
    if all(v > 0.0 for v in all_medians):
        ax.set_yscale("log")
    ax.set_xlabel("sigma_w")
    ax.set_ylabel("median max deviation")
    ax.legend()
    dev_path = csv_path.with_name(csv_path.stem + "_deviations.png")
    fig.savefig(dev_path, bbox_inches="tight")
    plt.close(fig)
    outputs.append(dev_path)
    return outputs
