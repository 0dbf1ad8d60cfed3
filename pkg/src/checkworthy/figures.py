"""Matplotlib renderings written next to the delimited report outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .corpus import Label
from .evaluation import EvalReport


def render_confusion_matrix(report: EvalReport, path: str | Path, title: str = "") -> None:
    grid = [[report.tp, report.fn], [report.fp, report.tn]]
    fig, ax = plt.subplots(figsize=(4.2, 3.6))
    im = ax.imshow(grid, cmap="Blues")
    ax.set_xticks([0, 1], ["Yes", "No"])
    ax.set_yticks([0, 1], ["Yes", "No"])
    ax.set_xlabel("predicted")
    ax.set_ylabel("gold")
    if title:
        ax.set_title(title)
    peak = max(max(row) for row in grid) or 1
    for r in (0, 1):
        for c in (0, 1):
            color = "white" if grid[r][c] > peak / 2 else "black"
            ax.text(c, r, str(grid[r][c]), ha="center", va="center", color=color)
    fig.colorbar(im, ax=ax, shrink=0.85)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_class_metrics(report: EvalReport, path: str | Path, title: str = "") -> None:
    names = ["precision", "recall", "F1"]
    yes = report.per_class[Label.YES]
    no = report.per_class[Label.NO]
    yes_vals = [yes.precision, yes.recall, yes.f1]
    no_vals = [no.precision, no.recall, no.f1]
    xs = range(len(names))
    width = 0.38
    fig, ax = plt.subplots(figsize=(5.4, 3.6))
    ax.bar([x - width / 2 for x in xs], yes_vals, width, label="Yes (positive)")
    ax.bar([x + width / 2 for x in xs], no_vals, width, label="No")
    ax.axhline(report.accuracy, linestyle="--", linewidth=1, color="gray",
               label=f"accuracy {report.accuracy:.3f}")
    ax.set_xticks(list(xs), names)
    ax.set_ylim(0.0, 1.05)
    ax.legend(loc="lower right", fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_frequency_bars(
    items: list[tuple[str, int]], path: str | Path, title: str = ""
) -> None:
    """Horizontal bar chart of a (token, count) ranking, highest on top."""
    tokens = [t for t, _ in items][::-1]
    counts = [c for _, c in items][::-1]
    fig, ax = plt.subplots(figsize=(5.8, max(2.4, 0.28 * len(items) + 1.0)))
    ax.barh(range(len(tokens)), counts)
    ax.set_yticks(range(len(tokens)), tokens)
    ax.set_xlabel("count")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
