"""Figure builders for the four supported CSV kinds.

Output is byte-stable for identical inputs: the Agg backend is forced and
file metadata that would embed a timestamp or toolchain string is
suppressed at save time.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
# SVG element ids are salted with object identity unless pinned
matplotlib.rcParams["svg.hashsalt"] = "plotkit"

import matplotlib.pyplot as plt
import numpy as np

from .schema import SchemaError, read_table

_LABELS = {
    "cosine": ("measurement phase (rad)", "transfer ratio"),
    "gain-sweep": ("recombination gain G", "error exponent"),
    "contour": ("signal photons", "noise photons"),
    "curves": ("signal photons", "advantage Q"),
}


@dataclass(frozen=True)
class FigureSpec:
    csv_path: Path
    kind: str
    out_path: Path
    xlabel: str | None = None
    ylabel: str | None = None
    title: str | None = None


def _draw_cosine(ax, data) -> None:
    ax.plot(data["phi"], data["ratio"], "o", ms=3, color="tab:blue", label="data")
    order = np.argsort(data["phi"])
    ax.plot(data["phi"][order], data["fit"][order], "-", color="tab:orange", label="fit")
    ax.legend(frameon=False)


def _draw_gain_sweep(ax, data) -> None:
    g = data["g"]
    ax.errorbar(g, data["e_mc"], yerr=data["e_mc_sigma"], fmt="o", ms=4,
                color="tab:blue", capsize=2, label="sampled")
    ax.fill_between(g, data["e_mc"] - data["e_mc_sigma"], data["e_mc"] + data["e_mc_sigma"],
                    color="tab:blue", alpha=0.2, linewidth=0)
    ax.plot(g, data["e_model"], "-", color="tab:orange", label="model")
    ax.axhline(float(data["e_cl"][0]), color="tab:green", ls="--", label="classical bound")
    ax.legend(frameon=False)


def _grid_pivot(data):
    xs = np.unique(data["n_sig"])
    ys = np.unique(data["n_noise"])
    if xs.size * ys.size != data["q"].size:
        raise ValueError("contour input is not a complete rectangular grid")
    q = np.full((ys.size, xs.size), np.nan)
    xi = np.searchsorted(xs, data["n_sig"])
    yi = np.searchsorted(ys, data["n_noise"])
    q[yi, xi] = data["q"]
    return xs, ys, q


def _draw_contour(ax, data) -> None:
    xs, ys, q = _grid_pivot(data)
    filled = ax.contourf(xs, ys, q, levels=12, cmap="viridis")
    ax.figure.colorbar(filled, ax=ax, label="advantage Q")
    # the Q = 1 level is the advantage boundary: always drawn heavy
    boundary = ax.contour(xs, ys, q, levels=[1.0], colors="crimson", linewidths=2.5)
    if boundary.levels.size:
        ax.clabel(boundary, fmt={1.0: "Q = 1"}, fontsize=9)
    ax.set_xscale("log")


def _draw_curves(ax, data) -> None:
    for nth_s in np.unique(data["nth_s"]):
        sel = data["nth_s"] == nth_s
        order = np.argsort(data["n_sig"][sel])
        ax.plot(data["n_sig"][sel][order], data["q"][sel][order], "-o", ms=3,
                label=f"thermal seed {nth_s:g}")
    ax.axhline(1.0, color="crimson", ls="--", lw=1.5)
    ax.set_xscale("log")
    ax.legend(frameon=False)


_DRAWERS = {
    "cosine": _draw_cosine,
    "gain-sweep": _draw_gain_sweep,
    "contour": _draw_contour,
    "curves": _draw_curves,
}


def build_figure(spec: FigureSpec):
    """Validate the CSV and lay out the figure without writing it."""
    data = read_table(spec.csv_path, spec.kind)
    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=150)
    _DRAWERS[spec.kind](ax, data)
    xlabel, ylabel = _LABELS[spec.kind]
    ax.set_xlabel(spec.xlabel or xlabel)
    ax.set_ylabel(spec.ylabel or ylabel)
    if spec.title:
        ax.set_title(spec.title)
    fig.tight_layout()
    return fig


def _bare_metadata(suffix: str) -> dict:
    # each writer embeds its own volatile fields; blank them all
    if suffix == ".png":
        return {"Software": None}
    if suffix == ".svg":
        return {"Date": None, "Creator": None}
    if suffix == ".pdf":
        return {"CreationDate": None, "Producer": None, "Creator": None}
    raise ValueError(f"unsupported image format: {suffix}")


def render(spec: FigureSpec) -> Path:
    """Render the CSV to an image file and return its path."""
    out = Path(spec.out_path)
    meta = _bare_metadata(out.suffix)
    fig = build_figure(spec)
    try:
        fig.savefig(out, metadata=meta)
    finally:
        plt.close(fig)
    return out
