"""CSV and key/value writers with fixed column orders.

Floats are written with ``repr`` so identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def run_table(run, indices=None):
    """Columns ``k, tau_k, alpha_k, x0.., z0..``; ``alpha`` and ``z`` are blank at ``k = N``."""
    grid = run.grid
    n = run.xs.shape[-1]
    header = ["k", "tau_k", "alpha_k"] + [f"x{j}" for j in range(n)] + [f"z{j}" for j in range(n)]
    idx = range(grid.N + 1) if indices is None else indices
    rows = []
    for k in idx:
        if k < grid.N:
            tail = [grid.alphas[k], *run.xs[k], *run.zs[k]]
        else:
            tail = ["", *run.xs[k], *[""] * n]
        rows.append([k, grid.taus[k], *tail])
    return header, rows


def breaks_table(grid):
    return ["i", "s_i", "K_i"], [[i, grid.taus[k], k] for i, k in enumerate(grid.K)]


def flow_table(flows, stride=1):
    """Columns ``interval, t, x0.., fbar``; keeps every ``stride``-th sample and each endpoint."""
    n = flows[0].states.shape[1]
    header = ["interval", "t"] + [f"x{j}" for j in range(n)] + ["fbar"]
    rows = []
    for i, f in enumerate(flows):
        keep = np.union1d(np.arange(0, f.times.size, stride), [f.times.size - 1])
        for j in keep:
            rows.append([i, f.times[j], *f.states[j], f.values[j]])
    return header, rows


def deviation_table(dev, grid):
    return ["k", "b_k", "raw_k", "zeta_k"], [
        [k, dev.b[k], dev.raw[k], grid.zeta[k]] for k in range(grid.N)
    ]


def measure_table(series, grid, run_index=None):
    """Columns ``k, tau_k, alpha_k, m_k, m_k_sq, radius``."""
    vals = series.values if run_index is None else series.values[run_index]
    rad = series.radius
    if rad is not None and run_index is not None and rad.ndim > 1:
        rad = rad[run_index]
    rows = []
    for k in range(grid.N):
        r = "" if rad is None else rad[k]
        rows.append([k, grid.taus[k], grid.alphas[k], vals[k], vals[k] ** 2, r])
    return ["k", "tau_k", "alpha_k", "m_k", "m_k_sq", "radius"], rows


def write_keyvalue(path, mapping, title=None):
    """TOML-style ``key = value`` lines."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [] if title is None else [f"[{title}]"]
    for k, v in mapping.items():
        if isinstance(v, str):
            lines.append(f'{k} = "{v}"')
        else:
            lines.append(f"{k} = {_fmt(v)}")
    path.write_text("\n".join(lines) + "\n")
    return path


def write_constants(directory, consts, stem="constants"):
    rep = consts.report()
    directory = Path(directory)
    write_keyvalue(directory / f"{stem}.toml", rep, title="constants")
    write_csv(directory / f"{stem}.csv", ["name", "value"], list(rep.items()))
    return rep


def to_jsonable(obj):
    """Convert numpy scalars and arrays inside ``obj`` to plain Python values."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj
