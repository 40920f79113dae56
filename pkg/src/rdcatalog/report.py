"""Offline report: score table plus rendered figures.

Writes three artifacts into the output directory: the relatedness
table as delimited text, a histogram of score values, and a drawing of
the title co-occurrence network.  Figures use a fixed circular layout
in export order rather than a force simulation, so repeated runs
produce the same picture for the same snapshot.
"""

from __future__ import annotations

import math
from pathlib import Path

from .model import CatalogSnapshot
from .relatedness import save_scores_csv

_FIG_DPI = 110

_METHOD_COLORS = {"pearson": "#1f6fb2", "emd": "#c7641e"}


def _agg_pyplot():
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    return plt


def _save(fig, path: Path) -> None:
    # strip the writer tag so identical inputs give identical bytes
    fig.savefig(path, dpi=_FIG_DPI, metadata={"Software": None})


def render_score_histogram(scores, path: Path) -> None:
    plt = _agg_pyplot()
    fig, ax = plt.subplots(figsize=(7, 4.5))
    try:
        by_method: dict[str, list[float]] = {}
        for s in scores:
            by_method.setdefault(s.method, []).append(s.score)
        bins = [i / 20 for i in range(21)]
        for method in sorted(by_method):
            ax.hist(
                by_method[method],
                bins=bins,
                alpha=0.65,
                label=f"{method} ({len(by_method[method])})",
                color=_METHOD_COLORS.get(method),
            )
        if by_method:
            ax.legend(loc="upper left")
        else:
            ax.text(0.5, 0.5, "no scores", ha="center", va="center", transform=ax.transAxes)
        ax.set_xlabel("relatedness score")
        ax.set_ylabel("dataset pairs")
        ax.set_xlim(0, 1)
        fig.tight_layout()
        _save(fig, path)
    finally:
        plt.close(fig)


def render_network(graph, path: Path, max_labels: int = 30) -> None:
    """Nodes on a circle in export order; sizes follow occurrence rates."""
    plt = _agg_pyplot()
    fig, ax = plt.subplots(figsize=(7.5, 7.5))
    try:
        if graph is None or not graph.nodes:
            ax.text(0.5, 0.5, "empty graph", ha="center", va="center", transform=ax.transAxes)
            ax.set_axis_off()
            fig.tight_layout()
            _save(fig, path)
            return
        nodes = sorted(graph.nodes, key=lambda n: (-n.count, n.term))
        n = len(nodes)
        coords = {}
        for i, node in enumerate(nodes):
            angle = 2 * math.pi * i / n
            coords[node.term] = (math.cos(angle), math.sin(angle))
        max_co = max((e.co_count for e in graph.edges), default=1)
        for edge in graph.edges:
            (x1, y1), (x2, y2) = coords[edge.term_a], coords[edge.term_b]
            ax.plot(
                [x1, x2],
                [y1, y2],
                color="#777777",
                linewidth=0.4 + 2.2 * edge.co_count / max_co,
                alpha=0.25 + 0.55 * edge.co_count / max_co,
                zorder=1,
            )
        xs = [coords[node.term][0] for node in nodes]
        ys = [coords[node.term][1] for node in nodes]
        sizes = [40 + 1200 * node.rate for node in nodes]
        ax.scatter(xs, ys, s=sizes, c="#2d88c9", edgecolors="white", zorder=2)
        for node in nodes[:max_labels]:
            x, y = coords[node.term]
            ax.annotate(
                node.term,
                (x * 1.08, y * 1.08),
                ha="center",
                va="center",
                fontsize=7,
                zorder=3,
            )
        ax.set_xlim(-1.35, 1.35)
        ax.set_ylim(-1.35, 1.35)
        ax.set_aspect("equal")
        ax.set_axis_off()
        fig.tight_layout()
        _save(fig, path)
    finally:
        plt.close(fig)


def render_report(snapshot: CatalogSnapshot, out_dir) -> list[Path]:
    """Write scores.csv, score_histogram.png, and network.png; return the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    scores_path = out / "scores.csv"
    save_scores_csv(snapshot.scores, scores_path)
    hist_path = out / "score_histogram.png"
    render_score_histogram(snapshot.scores, hist_path)
    net_path = out / "network.png"
    render_network(snapshot.graph, net_path)
    return [scores_path, hist_path, net_path]
