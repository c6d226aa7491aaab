"""SVG figures rendered with matplotlib's Agg backend.

Figures are saved without a date stamp and with a fixed hash salt so the
files are reproducible byte for byte.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_RC = {"svg.hashsalt": "psgdlab", "svg.fonttype": "none", "figure.dpi": 100}


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def _box_outline(ax, cset):
    if hasattr(cset, "lower") and cset.dim == 2:
        lo, hi = cset.lower, cset.upper
        xs = [lo[0], hi[0], hi[0], lo[0], lo[0]]
        ys = [lo[1], lo[1], hi[1], hi[1], lo[1]]
        ax.plot(xs, ys, color="0.3", lw=1)


def fig1_left(path, runs, flows, cset, labels):
    """Planar trajectories of several runs with their restarted flows dotted."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5, 5))
        _box_outline(ax, cset)
        colors = ["tab:blue", "tab:orange", "tab:green", "tab:red"]
        for j, (run, fl, lab) in enumerate(zip(runs, flows, labels)):
            c = colors[j % len(colors)]
            ax.plot(run.xs[:, 0], run.xs[:, 1], color=c, lw=0.8, label=lab)
            for f in fl:
                ax.plot(f.states[:, 0], f.states[:, 1], ls=":", color=c, lw=1.2)
            brk = run.xs[run.grid.K]
            ax.plot(brk[:, 0], brk[:, 1], "o", ms=3, color=c)
        ax.set_aspect("equal")
        ax.set_xlabel("x[0]")
        ax.set_ylabel("x[1]")
        ax.legend(loc="best", fontsize=8)
        return _save(fig, path)


def fig1_right(path, run, flows, minimizer=None):
    """Scalar iterates against simulated time with restarted flows and break points."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(7, 3.5))
        grid = run.grid
        ax.plot(grid.taus, run.xs[:, 0], color="tab:blue", lw=0.6, label="iterates")
        for f in flows:
            ax.plot(f.times, f.states[:, 0], ls=":", color="k", lw=1.2)
        for s in grid.breaks:
            ax.axvline(s, color="0.7", lw=0.6)
        if minimizer is not None:
            ax.axhline(minimizer, color="tab:red", lw=0.6, ls="--", label="minimizer")
        ax.set_xlabel("t")
        ax.set_ylabel("x")
        ax.legend(loc="best", fontsize=8)
        return _save(fig, path)


def series_plot(path, t, series, xlabel="t", ylabel="", logy=False, title=None):
    """Several named series against a shared abscissa."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(7, 3.5))
        for name, y in series.items():
            ax.plot(t, y, lw=0.9, label=name)
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title, fontsize=9)
        ax.legend(loc="best", fontsize=8)
        return _save(fig, path)


def loglog_plot(path, x, series, xlabel="N", ylabel=""):
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5, 4))
        for name, y in series.items():
            ax.loglog(x, np.asarray(y), "o-", ms=3, lw=0.9, label=name)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.legend(loc="best", fontsize=8)
        return _save(fig, path)
