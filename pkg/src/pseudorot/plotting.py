"""Static figures of arcs, certificates and tilings (matplotlib, headless)."""
from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Rectangle  # noqa: E402

from .arc_geometry import EssentialArc  # noqa: E402


def _fundamental_lines(ax, x_lo: float, x_hi: float) -> None:
    for k in range(math.floor(x_lo), math.ceil(x_hi) + 1):
        ax.axvline(k, color="0.75", lw=0.8, ls="--", zorder=0)
    ax.axhline(0, color="0.3", lw=0.8)
    ax.axhline(1, color="0.3", lw=0.8)


def plot_arcs(arcs: Sequence[EssentialArc], path: str | Path, labels: Sequence[str] | None = None,
              window: tuple[float, float] | None = None, title: str = "",
              project: bool = False) -> Path:
    """Draw arcs in the band; integer gridlines mark fundamental domains.

    With ``project`` every arc is also drawn at the integer translates that
    meet ``[0, 1]``, so the picture shows the arcs in the annulus.
    """
    path = Path(path)
    fig, ax = plt.subplots(figsize=(8, 3.2))
    cmap = plt.get_cmap("viridis", max(2, len(arcs)))
    xs = [a.x for a in arcs]
    lo = min(float(x.min()) for x in xs)
    hi = max(float(x.max()) for x in xs)
    if project:
        window = window or (0.0, 1.0)
    window = window or (lo - 0.1, hi + 0.1)
    for i, arc in enumerate(arcs):
        label = labels[i] if labels else None
        shifts = [0]
        if project:
            shifts = range(math.floor(window[0] - arc.x.max()), math.ceil(window[1] - arc.x.min()) + 1)
        for j, s in enumerate(shifts):
            ax.plot(arc.x + s, arc.t, color=cmap(i), lw=1.2, label=label if j == 0 else None)
    _fundamental_lines(ax, *window)
    ax.set_xlim(*window)
    ax.set_ylim(-0.05, 1.05)
    ax.set_xlabel("x")
    ax.set_ylabel("t")
    if title:
        ax.set_title(title)
    if labels:
        ax.legend(fontsize=7, ncol=min(len(arcs), 8), loc="upper center",
                  bbox_to_anchor=(0.5, -0.2), frameon=False)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_certificate(cert, path: str | Path) -> Path:
    arcs = [cert.arc, *cert.iterates]
    labels = ["arc"] + [f"h^{k}" for k in range(1, len(arcs))]
    iv = cert.interval
    title = (f"]{iv.p}/{iv.q}, {iv.p2}/{iv.q2}[  min distance {cert.min_pairwise_distance:.3g}"
             f"  order {list(cert.cyclic_order)}")
    return plot_arcs(arcs, path, labels, title=title, project=True)


def plot_tiling(tiling, path: str | Path) -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(8, 2.4))
    colors = {"D": "tab:blue", "D2": "tab:orange"}
    for tile in tiling.tiles:
        for shift in (-1, 0):
            ax.add_patch(Rectangle((tile.x0 + shift, 0), tile.width, 1, facecolor=colors[tile.kind],
                                   edgecolor="k", alpha=0.5, lw=0.8))
        ax.text(tile.x0 + tile.width / 2, 0.5, f"{tile.kind}{tile.k}", ha="center",
                va="center", fontsize=7)
    _fundamental_lines(ax, 0, 1)
    ax.set_xlim(0, 1)
    ax.set_ylim(-0.05, 1.05)
    iv = tiling.interval
    ax.set_title(f"tiling for alpha = {tiling.alpha:g} in ]{iv.p}/{iv.q}, {iv.p2}/{iv.q2}[")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
