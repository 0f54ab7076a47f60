"""Matplotlib rendering of effort curves and system-correlation scatter plots.

Figures are written to files next to the CSV/JSONL reports; nothing is shown
interactively.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .eval import CorrelationReport, EffortCurve


def save_effort_curve_figure(curve: EffortCurve, path: str | Path, title: str = "") -> None:
    """Hit@k against the judging cutoff, annotated with the effort saved at each point."""
    ks = [k for k, _, _ in curve.points]
    hits = [hit for _, _, hit in curve.points]
    efforts = [effort for _, effort, _ in curve.points]

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(ks, hits, marker="o", color="#1f6fb4")
    for k, effort, hit in zip(ks, efforts, hits):
        ax.annotate(
            f"-{effort:.0%}", (k, hit), textcoords="offset points", xytext=(0, 8),
            ha="center", fontsize=8, color="#555555",
        )
    ax.set_xscale("log")
    ax.set_xticks(ks)
    ax.set_xticklabels([str(k) for k in ks])
    ax.set_xlabel("judged candidates per topic (k)")
    ax.set_ylabel("Hit@k")
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, alpha=0.3)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_correlation_figure(report: CorrelationReport, path: str | Path) -> None:
    """Per-system metric values under the two judgment sets, with the agreement diagonal."""
    values_a = [a for _, a, _ in report.pairs]
    values_b = [b for _, _, b in report.pairs]

    fig, ax = plt.subplots(figsize=(4.8, 4.8))
    lo = min(values_a + values_b + [0.0])
    hi = max(values_a + values_b + [1e-9]) * 1.05
    ax.plot([lo, hi], [lo, hi], linestyle="--", color="#999999", linewidth=1)
    ax.scatter(values_a, values_b, color="#c23b22", zorder=3)
    for tag, a, b in report.pairs:
        ax.annotate(tag, (a, b), textcoords="offset points", xytext=(4, 4), fontsize=7)
    ax.set_xlabel(f"{report.metric} (judgment set A)")
    ax.set_ylabel(f"{report.metric} (judgment set B)")
    ax.set_title(
        f"{len(report.systems)} systems; "
        f"tau={report.kendall:.3f}, rho={report.spearman:.3f}"
    )
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
