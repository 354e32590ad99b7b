"""Figure rendering and delimited series export for the CLI report paths."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def write_series_csv(path, header: list[str], rows) -> str:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return str(path)


def plot_distance_curve(lengths, values, path, title="distance vs prefix length") -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(lengths, values, "o-")
    ax.set_xscale("log")
    ax.set_xlabel("prefix length n")
    ax.set_ylabel("estimated distance")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def plot_split_profile(ts, scores, n, indices, path) -> str:
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(np.asarray(ts) / n, scores, lw=1)
    for idx in indices:
        ax.axvline(idx / n, color="crimson", ls="--", lw=1)
    ax.set_xlabel("split position t / n")
    ax.set_ylabel("split score")
    ax.set_title("change-point split scores")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def plot_center_distances(matrix, centers, path) -> str:
    matrix = np.asarray(matrix)
    fig, ax = plt.subplots(figsize=(6, 4))
    im = ax.imshow(matrix, aspect="auto", cmap="viridis")
    ax.set_xlabel("cluster center")
    ax.set_ylabel("sample index")
    ax.set_xticks(range(len(centers)), [f"#{c}" for c in centers])
    ax.set_title("distance to cluster centers")
    fig.colorbar(im, ax=ax, label="distance")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def plot_calibration(values_per_model, gamma, statistic, path) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    for i, vals in enumerate(values_per_model):
        ax.hist(vals, bins=40, alpha=0.5, label=f"model {i}")
    ax.axvline(gamma, color="crimson", ls="--", label=f"gamma = {gamma:.4g}")
    if statistic is not None:
        ax.axvline(statistic, color="black", lw=2, label=f"observed = {statistic:.4g}")
    ax.set_xlabel("distance to hypothesis")
    ax.set_ylabel("calibration runs")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)
