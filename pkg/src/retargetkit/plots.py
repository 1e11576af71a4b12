"""Figure rendering for the CLI report paths (file output only)."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def save_trace_figure(iterations, fitness, path: str | Path) -> None:
    """Line plot of the search's best fitness per iteration."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(iterations, fitness, marker="o", markersize=3, linewidth=1.2)
    ax.set_xlabel("iteration")
    ax.set_ylabel("best fitness")
    ax.set_title("placement search convergence")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_fitness_figure(records, path: str | Path) -> None:
    """Fitness vs. target pixel count, one series per image.

    Runs without a fitness value (empty masks) are skipped.
    """
    by_image: dict[str, list[tuple[int, float]]] = {}
    for rec in records:
        if rec.report is None:
            continue
        area = rec.target_width * rec.target_height
        by_image.setdefault(rec.image_id, []).append((area, rec.report.total))
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for image_id, points in sorted(by_image.items()):
        points.sort()
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        ax.plot(xs, ys, marker="o", markersize=3, linewidth=1.0, label=image_id)
    ax.set_xlabel("target size (pixels)")
    ax.set_ylabel("fitness")
    ax.set_title("fitness across target sizes")
    ax.grid(alpha=0.3)
    if by_image:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_timing_figure(records, path: str | Path) -> None:
    """Mean wall time per (width ratio, height ratio) combination."""
    sums: dict[tuple[float, float], list[float]] = {}
    for rec in records:
        sums.setdefault((rec.ratio_w, rec.ratio_h), []).append(rec.wall_time)
    pairs = sorted(sums)
    labels = [f"{rw:g}x{rh:g}" for rw, rh in pairs]
    means = [sum(sums[p]) / len(sums[p]) for p in pairs]
    fig, ax = plt.subplots(figsize=(max(7.0, 0.3 * len(pairs)), 4.0))
    ax.bar(range(len(pairs)), means)
    ax.set_xticks(range(len(pairs)))
    ax.set_xticklabels(labels, rotation=90, fontsize=7)
    ax.set_xlabel("width x height ratio")
    ax.set_ylabel("mean wall time (s)")
    ax.set_title("retargeting time per ratio pair")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
