"""Report figures rendered straight to files.

The CLI report path drops a PNG next to each delimited table so a run is
inspectable without a plotting session.  The Agg backend is forced before
pyplot loads; nothing here ever opens a window.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .montecarlo import SummaryTable, bucket_labels


def _active_buckets(summary: SummaryTable) -> list[str]:
    labels = bucket_labels(summary.config.cutoff)
    seen = set()
    for s in summary.sizes:
        seen.update(k for k, v in s.bucket_counts.items() if v > 0)
    return [k for k in labels if k in seen]


def hopcount_pmf_figure(summary: SummaryTable, path) -> None:
    """Grouped bars of the empirical hopcount pmf, one group colour per N."""
    labels = _active_buckets(summary)
    if not labels:
        labels = ["0"]
    x = np.arange(len(labels))
    k = len(summary.sizes)
    width = 0.8 / max(k, 1)

    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    for j, s in enumerate(summary.sizes):
        pmf = s.pmf()
        heights = [pmf.get(b, 0.0) for b in labels]
        ax.bar(x + (j - (k - 1) / 2) * width, heights, width,
               label=f"N = {s.n:,}")
    ax.set_xticks(x)
    ax.set_xticklabels(labels)
    ax.set_xlabel("hopcount")
    ax.set_ylabel("empirical probability")
    alpha = summary.config.alpha
    cond = "" if alpha is None else f", degrees < N^{alpha:g}"
    ax.set_title(f"Hopcount between two fixed nodes (tau = {summary.config.tau:g}{cond})")
    ax.legend(frameon=False)
    ax.set_ylim(0, 1)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def ratio_cdf_figure(grid: np.ndarray, empirical: np.ndarray, analytic: np.ndarray,
                     tau: float, n: int, path) -> None:
    """Empirical vs analytic CDFs of the top degree ratios.

    Args:
        grid: evaluation points, shape (g,).
        empirical: per-rank empirical CDF values, shape (k, g).
        analytic: matching analytic CDF values, shape (k, g).
    """
    empirical = np.atleast_2d(empirical)
    analytic = np.atleast_2d(analytic)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for i in range(empirical.shape[0]):
        c = colors[i % len(colors)]
        ax.plot(grid, analytic[i], color=c, lw=1.5, label=f"rank {i + 1} limit")
        ax.plot(grid, empirical[i], color=c, lw=1.0, ls="--")
    ax.set_xlabel("x")
    ax.set_ylabel("P(ratio <= x)")
    ax.set_title(f"Top degree ratios vs limit law (tau = {tau:g}, N = {n:,})")
    ax.legend(frameon=False, fontsize=8)
    ax.set_ylim(0, 1.02)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def event_rates_figure(summary: SummaryTable, path) -> None:
    """Certificate event frequencies across the size grid."""
    ns = [s.n for s in summary.sizes]
    keys = ["endpoints_to_giants", "giants_complete", "endpoints_bounded", "certified"]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for key in keys:
        rates = [s.event_rates.get(key) if s.event_rates else np.nan for s in summary.sizes]
        ax.plot(ns, rates, marker="o", label=key)
    ax.set_xscale("log")
    ax.set_xlabel("N")
    ax.set_ylabel("empirical frequency")
    ax.set_title(f"Short-path certificate events (tau = {summary.config.tau:g})")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
