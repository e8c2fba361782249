"""Figure emission: critical-difference diagrams, scatter/histogram plots,
Texas-sharpshooter plots and parameter-selection frequency charts.

Every figure is written as SVG next to a sidecar CSV holding exactly the
plotted values, so the SVG is a pure function of its sidecar. Matplotlib's
hash salt and date metadata are pinned to keep the SVG bytes reproducible.
"""

from __future__ import annotations

from collections import Counter
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "clfbench"
import matplotlib.pyplot as plt
import numpy as np

from clfbench.stats import CliqueSet, RankSummary, SharpshooterPoint

_SAVE_KWARGS = {"format": "svg", "metadata": {"Date": None}}


def _sidecar(path: Path) -> Path:
    return path.with_suffix(".csv")


def emit_cd_diagram(ranks: RankSummary, cliques: CliqueSet, path) -> Path:
    """Critical-difference diagram: mean ranks on a [1, k] axis, labels
    alternating above/below, one solid bar per clique. A plain-text rendering
    (.txt) and the values CSV accompany the SVG."""
    path = Path(path)
    k = len(ranks.classifiers)
    order = cliques.order

    with open(_sidecar(path), "w", encoding="utf-8") as fh:
        fh.write("classifier,mean_rank,cliques\n")
        for idx in order:
            member_of = [ci for ci, cl in enumerate(cliques.cliques) if idx in cl]
            fh.write(
                f"{ranks.classifiers[idx]},{ranks.mean_ranks[idx]:.6f},"
                f"{'|'.join(str(c) for c in member_of)}\n"
            )

    lines = ["mean ranks (1 = best):"]
    for idx in order:
        lines.append(f"  {ranks.mean_ranks[idx]:6.3f}  {ranks.classifiers[idx]}")
    lines.append("cliques (no significant pairwise difference inside):")
    for cl in cliques.cliques:
        lines.append("  {" + ", ".join(ranks.classifiers[i] for i in cl) + "}")
    path.with_suffix(".txt").write_text("\n".join(lines) + "\n", encoding="utf-8")

    fig, ax = plt.subplots(figsize=(8, 2.2 + 0.4 * k))
    ax.set_xlim(0.8, k + 0.2)
    ax.set_ylim(-1.2 - 0.35 * len(cliques.cliques), 1.6)
    ax.axhline(0, color="black", lw=1.2)
    for r in range(1, k + 1):
        ax.plot([r, r], [0, 0.12], color="black", lw=1)
        ax.text(r, 0.22, str(r), ha="center", va="bottom", fontsize=9)
    for pos, idx in enumerate(order):
        rank = ranks.mean_ranks[idx]
        above = pos % 2 == 0
        ytext = 1.1 if above else -0.75
        ax.plot([rank, rank], [0, ytext + (-0.18 if above else 0.18)], color="gray", lw=0.8)
        ax.text(
            rank,
            ytext,
            f"{ranks.classifiers[idx]} ({rank:.2f})",
            ha="center",
            va="bottom" if above else "top",
            fontsize=9,
        )
    for ci, cl in enumerate(cliques.cliques):
        if len(cl) < 2:
            continue
        lo = min(ranks.mean_ranks[i] for i in cl)
        hi = max(ranks.mean_ranks[i] for i in cl)
        yy = -1.0 - 0.3 * ci
        ax.plot([lo, hi], [yy, yy], color="black", lw=3.5, solid_capstyle="butt")
    ax.axis("off")
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
    return path


def emit_scatter(a, b, path, label_a="classifier A", label_b="classifier B") -> Path:
    """Accuracy-vs-accuracy scatter with the y = x diagonal."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or len(a) == 0:
        raise ValueError("need two equal-length non-empty accuracy vectors")
    path = Path(path)
    with open(_sidecar(path), "w", encoding="utf-8") as fh:
        fh.write(f"{label_a},{label_b}\n")
        for xa, xb in zip(a, b):
            fh.write(f"{xa:.6f},{xb:.6f}\n")
    fig, ax = plt.subplots(figsize=(5, 5))
    lo = min(a.min(), b.min()) - 0.02
    hi = max(a.max(), b.max()) + 0.02
    ax.plot([lo, hi], [lo, hi], color="gray", lw=1)
    ax.scatter(a, b, s=18, color="tab:blue", zorder=3)
    ax.set_xlabel(label_a)
    ax.set_ylabel(label_b)
    ax.set_xlim(lo, hi)
    ax.set_ylim(lo, hi)
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
    return path


def emit_histogram(diffs, bin_width: float, path, label="accuracy difference") -> Path:
    """Histogram of accuracy differences with fixed-width bins anchored at 0."""
    diffs = np.asarray(diffs, dtype=np.float64)
    if len(diffs) == 0:
        raise ValueError("no differences to plot")
    if not bin_width > 0:
        raise ValueError("bin_width must be positive")
    path = Path(path)
    lo = np.floor(diffs.min() / bin_width) * bin_width
    hi = np.ceil(diffs.max() / bin_width) * bin_width
    edges = np.arange(lo, hi + bin_width / 2, bin_width)
    if len(edges) < 2:
        edges = np.array([lo, lo + bin_width])
    counts, edges = np.histogram(diffs, bins=edges)
    with open(_sidecar(path), "w", encoding="utf-8") as fh:
        fh.write("bin_low,bin_high,count\n")
        for i, c in enumerate(counts):
            fh.write(f"{edges[i]:.6f},{edges[i + 1]:.6f},{c}\n")
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(edges[:-1], counts, width=bin_width, align="edge", color="tab:blue", edgecolor="black")
    ax.set_xlabel(label)
    ax.set_ylabel("count")
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
    return path


def emit_sharpshooter(points, path, label_a="A", label_b="B") -> Path:
    """Texas-sharpshooter plot: train-CV ratio vs test ratio with the
    ratio-1 crosshair; quadrants count predicted-vs-observed outcomes."""
    pts = [p if isinstance(p, SharpshooterPoint) else SharpshooterPoint.classify(*p) for p in points]
    if not pts:
        raise ValueError("no sharpshooter points")
    path = Path(path)
    with open(_sidecar(path), "w", encoding="utf-8") as fh:
        fh.write("train_cv_ratio,test_ratio,quadrant\n")
        for p in pts:
            fh.write(f"{p.train_ratio:.6f},{p.test_ratio:.6f},{p.quadrant}\n")
    fig, ax = plt.subplots(figsize=(5.5, 5.5))
    xs = np.array([p.test_ratio for p in pts])
    ys = np.array([p.train_ratio for p in pts])
    ax.axhline(1.0, color="gray", lw=1)
    ax.axvline(1.0, color="gray", lw=1)
    colors = {"TP": "tab:green", "TN": "tab:blue", "FP": "tab:red", "FN": "tab:orange"}
    for quadrant, color in colors.items():
        mask = np.array([p.quadrant == quadrant for p in pts])
        if mask.any():
            ax.scatter(xs[mask], ys[mask], s=16, color=color, label=quadrant, zorder=3)
    ax.set_xlabel(f"test accuracy ratio {label_a}/{label_b}")
    ax.set_ylabel(f"train CV accuracy ratio {label_a}/{label_b}")
    ax.legend(loc="best", fontsize=8)
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
    return path


def emit_param_frequency(chosen_params_list, path, param_names=None) -> Path:
    """Bar chart of how often each parameter setting won the tuning search,
    normalized to proportions that sum to 1."""
    if not chosen_params_list:
        raise ValueError("no tuning histories")
    path = Path(path)
    if param_names is None:
        param_names = sorted({k for params in chosen_params_list for k in params})
    labels = [
        ";".join(f"{k}={params.get(k)}" for k in param_names) for params in chosen_params_list
    ]
    counts = Counter(labels)
    keys = sorted(counts)
    total = sum(counts.values())
    proportions = [counts[k] / total for k in keys]
    with open(_sidecar(path), "w", encoding="utf-8") as fh:
        fh.write("setting,proportion\n")
        for k, prop in zip(keys, proportions):
            fh.write(f"{k.replace(',', ';')},{prop:.6f}\n")
    fig, ax = plt.subplots(figsize=(max(6, 0.5 * len(keys)), 4))
    ax.bar(range(len(keys)), proportions, color="tab:blue", edgecolor="black")
    ax.set_xticks(range(len(keys)))
    ax.set_xticklabels(keys, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("proportion of resamples")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
    return path
