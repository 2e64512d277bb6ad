"""Figure rendering for CLI reports.

Charts are written as PNG files next to the textual report when the user
passes `--figures DIR`; stdout stays byte-stable either way.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def bar_chart(path: str, labels, values, title: str, ylabel: str = "count") -> str:
    fig, ax = plt.subplots(figsize=(max(4.0, 0.9 * len(labels) + 1.5), 3.2))
    xs = range(len(labels))
    ax.bar(xs, values, color="#4878a8")
    ax.set_xticks(list(xs))
    ax.set_xticklabels([str(l) for l in labels], rotation=30, ha="right", fontsize=8)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    for x, v in zip(xs, values):
        ax.text(x, v, str(v), ha="center", va="bottom", fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def grid_chart(path: str, row_labels, col_labels, values, title: str) -> str:
    fig, ax = plt.subplots(figsize=(1.0 + 0.7 * len(col_labels), 1.0 + 0.6 * len(row_labels)))
    im = ax.imshow(values, cmap="Blues")
    ax.set_xticks(range(len(col_labels)))
    ax.set_xticklabels([str(c) for c in col_labels], fontsize=8)
    ax.set_yticks(range(len(row_labels)))
    ax.set_yticklabels([str(r) for r in row_labels], fontsize=8)
    for i in range(len(row_labels)):
        for j in range(len(col_labels)):
            ax.text(j, i, str(values[i][j]), ha="center", va="center", fontsize=7)
    ax.set_title(title, fontsize=9)
    fig.colorbar(im, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def figure_path(outdir: str, name: str) -> str:
    os.makedirs(outdir, exist_ok=True)
    return os.path.join(outdir, name)
