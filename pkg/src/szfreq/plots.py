"""Report figures, rendered headlessly to image files.

Every function takes already-computed report objects and writes one PNG,
returning the path. The Agg backend is forced before pyplot loads so
nothing here ever needs a display.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .metrics import Report  # noqa: E402
from .pipeline import ScreeningStats  # noqa: E402


def _finish(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_confusion_heatmap(report: Report, path: str | Path, title: str = "") -> Path:
    n = len(report.classes)
    fig, ax = plt.subplots(figsize=(max(4.0, 0.8 * n + 2), max(3.5, 0.8 * n + 1.5)))
    matrix = [[report.matrix[i][j] for j in range(n)] for i in range(n)]
    image = ax.imshow(matrix, cmap="Blues")
    ax.set_xticks(range(n), report.classes, rotation=45, ha="right")
    ax.set_yticks(range(n), report.classes)
    ax.set_xlabel("predicted")
    ax.set_ylabel("gold")
    if title:
        ax.set_title(title)
    peak = max((max(row) for row in matrix), default=0)
    for i in range(n):
        for j in range(n):
            value = matrix[i][j]
            color = "white" if peak and value > 0.5 * peak else "black"
            ax.text(j, i, str(value), ha="center", va="center", color=color, fontsize=8)
    fig.colorbar(image, ax=ax, shrink=0.8)
    return _finish(fig, path)


def save_f1_bars(report: Report, path: str | Path, title: str = "") -> Path:
    classes = list(report.classes)
    scores = [report.per_class[c].f1 for c in classes]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.7 * len(classes) + 2), 3.5))
    bars = ax.bar(range(len(classes)), scores, color="#4878a8")
    ax.set_xticks(range(len(classes)), classes, rotation=45, ha="right")
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("F1")
    ax.axhline(report.macro.f1, linestyle="--", color="#a84848", linewidth=1,
               label=f"macro F1 = {report.macro.f1:.4f}")
    ax.legend(loc="lower right", fontsize=8)
    if title:
        ax.set_title(title)
    ax.bar_label(bars, fmt="%.2f", fontsize=7)
    return _finish(fig, path)


def save_distribution_bars(
    counts: Mapping[str, int], path: str | Path, title: str = ""
) -> Path:
    classes = list(counts)
    values = [counts[c] for c in classes]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.7 * len(classes) + 2), 3.5))
    bars = ax.bar(range(len(classes)), values, color="#5a9367")
    ax.set_xticks(range(len(classes)), classes, rotation=45, ha="right")
    ax.set_ylabel("count")
    if title:
        ax.set_title(title)
    ax.bar_label(bars, fontsize=8)
    return _finish(fig, path)


def save_screening_bars(stats: ScreeningStats, path: str | Path, title: str = "") -> Path:
    groups = (
        ("with analysis", stats.with_analysis),
        ("without analysis", stats.without_analysis),
    )
    n_passes = max((len(g.discarded_per_pass) for _, g in groups), default=1)
    width = 0.35
    fig, ax = plt.subplots(figsize=(max(4.0, n_passes + 3), 3.5))
    for offset, (name, group) in enumerate(groups):
        xs = [k + (offset - 0.5) * width for k in range(len(group.discarded_per_pass))]
        bars = ax.bar(xs, group.discarded_per_pass, width=width, label=name)
        ax.bar_label(bars, fontsize=8)
    ax.set_xticks(range(n_passes), [f"pass {k + 1}" for k in range(n_passes)])
    ax.set_ylabel("records still failing")
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    return _finish(fig, path)
