"""Figure rendering for the report-producing CLI commands.

Figures are written next to the delimited output so a sweep or comparison
run leaves both a machine-readable table and a ready-to-look-at picture.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def render_sweep_figure(rows, path) -> None:
    """Objective-per-unit-demand vs network size, with both limit lines."""
    sizes = [row["N"] for row in rows]
    objectives = [row["objective_per_Q"] for row in rows]
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(sizes, objectives, marker="o", markersize=3, lw=1.2,
            label="objective / Q")
    if rows:
        ax.axhline(rows[0]["limit_consistent"], color="tab:green", lw=1.0,
                   ls="--", label="large-N limit (consistent)")
        ax.axhline(rows[0]["limit_as_printed"], color="tab:red", lw=1.0,
                   ls=":", label="large-N limit (as printed)")
        ax.set_title(f"k={rows[0]['k']}, a={rows[0]['a']}")
    ax.set_xlabel("network size N")
    ax.set_ylabel("max per-node energy per unit demand")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_compare_figure(rows, path) -> None:
    """Grouped bars: objective by source node and method."""
    methods = []
    for row in rows:
        if row["method"] not in methods:
            methods.append(row["method"])
    sources = sorted({row["k"] for row in rows})
    width = 0.8 / max(len(methods), 1)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for m_idx, method in enumerate(methods):
        xs, ys = [], []
        for s_idx, k in enumerate(sources):
            for row in rows:
                if row["method"] == method and row["k"] == k:
                    xs.append(s_idx + m_idx * width)
                    ys.append(row["objective"])
        ax.bar(xs, ys, width=width, label=method)
    ax.set_xticks([i + 0.4 - width / 2 for i in range(len(sources))])
    ax.set_xticklabels([str(k) for k in sources])
    ax.set_xlabel("source node")
    ax.set_ylabel("max per-node energy")
    ax.grid(True, axis="y", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
