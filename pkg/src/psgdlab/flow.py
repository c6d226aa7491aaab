"""Projected gradient flow, the restarted flows and the deviations ``b_k``.

The flow ``dx/dt = P_{T_X(x)}(-grad fbar(x))`` is integrated by projected Euler,
``y <- P_X(y - h grad fbar(y))``, which is consistent with the flow because
``(P_X(x + a g) - x) / a`` tends to the tangent-cone projection of ``g``.

On every interval ``[s_i, s_{i+1}]`` of the time grid a fresh flow starts from
the iterate at ``s_i``. The concatenation of these flows is the jumping
process, and ``b_k`` is the largest distance between it and the frozen
iterate ``x_k`` over ``[tau_k, tau_{k+1}]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, NumericalFailure

#: default target substep for the jumping process
DEFAULT_H = 1e-3


@dataclass
class FlowPath:
    """Samples of one flow on a uniform grid of spacing ``h``."""

    times: np.ndarray
    states: np.ndarray
    grads: np.ndarray
    values: np.ndarray
    h: float

    def value_at(self, t):
        """State at time ``t`` by linear interpolation between samples."""
        return np.array([np.interp(t, self.times, self.states[:, j])
                         for j in range(self.states.shape[1])]).T


def max_flow_step(problem):
    return min(1e-2, 1.0 / (10.0 * problem.ell))


def integrate_projected_ode(problem, cset, x0, t0, t1, h):
    """Projected Euler from ``x0`` at ``t0`` to ``t1`` with step ``h``.

    The last step is shortened so that the path ends exactly at ``t1``.
    """
    x0 = cset.check_point(np.atleast_1d(np.asarray(x0, dtype=float)))
    h = float(h)
    if not (h > 0 and h <= max_flow_step(problem) * (1 + 1e-12)):
        raise InvalidInput(f"h must lie in (0, {max_flow_step(problem)}]")
    if not t1 >= t0:
        raise InvalidInput("t1 must not precede t0")
    m = max(1, math.ceil((t1 - t0) / h - 1e-9)) if t1 > t0 else 0
    steps = np.full(m, h)
    if m:
        steps[-1] = (t1 - t0) - h * (m - 1)
    times = t0 + np.concatenate([[0.0], np.cumsum(steps)])
    if m:
        times[-1] = t1
    states = np.empty((m + 1, cset.dim))
    grads = np.empty((m + 1, cset.dim))
    y = x0.copy()
    states[0] = y
    grads[0] = problem.mean_grad(y)
    for j in range(m):
        y = cset.project(y - steps[j] * grads[j])
        if not np.isfinite(y).all():
            raise NumericalFailure(f"non-finite flow state at step {j + 1}", index=j + 1)
        states[j + 1] = y
        grads[j + 1] = problem.mean_grad(y)
    return FlowPath(times, states, grads, problem.value(states), h)


# -- jumping process ------------------------------------------------------------

def substeps(alphas, h=None):
    """Euler substeps per iterate: ``m_k = max(2, ceil(alpha_k / h))``."""
    h = DEFAULT_H if h is None else float(h)
    return np.maximum(2, np.ceil(alphas / h - 1e-9)).astype(np.int64)


@dataclass
class _SlotTable:
    k: np.ndarray      # (I, L) iterate index per substep, N for padding
    h: np.ndarray      # (I, L) substep length, 0 for padding
    first: np.ndarray  # (I, L) True on the first substep of an iterate


def _slot_table(grid, m):
    I = grid.n_intervals
    lengths = np.add.reduceat(m, grid.K[:-1])
    L = int(lengths.max())
    k_tab = np.full((I, L), grid.N, dtype=np.int64)
    h_tab = np.zeros((I, L))
    first = np.zeros((I, L), dtype=bool)
    for i in range(I):
        ks = np.arange(grid.K[i], grid.K[i + 1])
        rep = m[ks]
        k_tab[i, :rep.sum()] = np.repeat(ks, rep)
        h_tab[i, :rep.sum()] = np.repeat(grid.alphas[ks] / rep, rep)
        starts = np.concatenate([[0], np.cumsum(rep)[:-1]])
        first[i, starts] = True
    return _SlotTable(k_tab, h_tab, first)


@dataclass
class JumpingBatch:
    """Jumping process summaries for ``R`` runs.

    Attributes
    ----------
    b : ndarray, shape (R, N)
        Reported deviations ``min(raw + margin, D)``.
    raw : ndarray, shape (R, N)
        Largest sampled distance ``||x^J_t - x_k||``.
    margin : ndarray, shape (N,)
        Allowance for the unsampled part of the sup, ``2 u h_k``.
    xJ : ndarray, shape (R, N + 1, n)
        Jumping process at ``tau_k`` (the restart value at break points);
        the last entry is the final flow's state at ``tau_N``.
    flow_end : ndarray, shape (R, I, n)
        State of flow ``i`` at ``s_{i+1}``.
    integrals : ndarray, shape (R, N, n) or None
        Trapezoid estimates of ``int_{tau_k}^{tau_{k+1}} grad fbar(x^C_t) dt``.
    """

    b: np.ndarray
    raw: np.ndarray
    margin: np.ndarray
    xJ: np.ndarray
    flow_end: np.ndarray
    integrals: np.ndarray | None
    grid: object
    h_k: np.ndarray
    paths: list | None = None

    def interval_max(self):
        """``max_k b_k`` over each interval, shape ``(R, I)``."""
        return np.maximum.reduceat(self.b, self.grid.K[:-1], axis=1)

    def __getitem__(self, r):
        return DeviationRecord(self.b[r], self.raw[r], self.margin, self.interval_max()[r],
                               self.xJ[r], self.flow_end[r], self.grid)


@dataclass
class DeviationRecord:
    """Deviations of one run: ``b_k`` and the per-interval maxima."""

    b: np.ndarray
    raw: np.ndarray
    margin: np.ndarray
    interval_max: np.ndarray
    xJ: np.ndarray
    flow_end: np.ndarray
    grid: object


def jumping_process_batch(xs, grid, problem, cset, h=None, integrals=False, keep_paths=False):
    """Integrate the restarted flows of every run and interval simultaneously.

    Parameters
    ----------
    xs : ndarray, shape (R, N + 1, n)
        Iterates of ``R`` runs on ``grid``.
    h : float, optional
        Target Euler step; each iterate interval ``[tau_k, tau_{k+1}]`` is cut
        into ``max(2, ceil(alpha_k / h))`` equal substeps.
    integrals : bool
        Also accumulate the integrals needed by the discretized process.
    keep_paths : bool
        Keep every substep state (for plotting single runs).
    """
    xs = np.asarray(xs, dtype=float)
    if xs.ndim == 2:
        xs = xs[None]
    R, Np1, n = xs.shape
    if Np1 != grid.N + 1:
        raise InvalidInput("run length does not match the grid")
    h = DEFAULT_H if h is None else float(h)
    if not 0 < h <= max_flow_step(problem) * (1 + 1e-12):
        h = min(h, max_flow_step(problem))
    m = substeps(grid.alphas, h)
    tab = _slot_table(grid, m)
    I, L = tab.k.shape
    N = grid.N
    # an extra column absorbs padding slots
    raw = np.zeros((R, N + 1))
    xJ = np.empty((R, N + 1, n))
    integ = np.zeros((R, N + 1, n)) if integrals else None
    y = xs[:, grid.K[:-1]].copy()
    xs_pad = np.concatenate([xs[:, :N], xs[:, N - 1:N]], axis=1)
    g = problem.mean_grad(y)
    paths = [y.copy()] if keep_paths else None
    for s in range(L):
        ks = tab.k[:, s]
        hs = tab.h[:, s][None, :, None]
        anchor = xs_pad[:, ks]
        if tab.first[:, s].any():
            rows = tab.first[:, s]
            xJ[:, ks[rows]] = y[:, rows]
        d0 = np.linalg.norm(y - anchor, axis=-1)
        y_new = cset.project(y - hs * g)
        g_new = problem.mean_grad(y_new)
        d1 = np.linalg.norm(y_new - anchor, axis=-1)
        raw[:, ks] = np.maximum(raw[:, ks], np.maximum(d0, d1))
        if integrals:
            integ[:, ks] += 0.5 * hs * (g + g_new)
        y, g = y_new, g_new
        if keep_paths:
            paths.append(y.copy())
        if not np.isfinite(y).all():
            raise NumericalFailure(f"non-finite flow state at substep {s + 1}", index=s + 1)
    xJ[:, N] = y[:, -1]
    h_k = grid.alphas / m
    u = problem.u(cset)
    margin = 2.0 * u * h_k
    b = np.minimum(raw[:, :N] + margin, cset.diameter)
    return JumpingBatch(
        b=b, raw=raw[:, :N], margin=margin, xJ=xJ, flow_end=y,
        integrals=None if integ is None else integ[:, :N], grid=grid, h_k=h_k,
        paths=None if paths is None else (tab, np.stack(paths, axis=1)),
    )


def build_jumping_process(run, grid, problem, cset, h=None, keep_paths=True):
    """Restarted flows and deviations for a single run.

    Returns
    -------
    flows : list of FlowPath
        One path per interval ``[s_i, s_{i+1}]`` (empty if ``keep_paths`` is False).
    dev : DeviationRecord
    """
    jb = jumping_process_batch(run.xs, grid, problem, cset, h=h, integrals=keep_paths,
                               keep_paths=keep_paths)
    flows = []
    if keep_paths:
        tab, states = jb.paths
        states = states[0]
        for i in range(grid.n_intervals):
            valid = tab.h[i] > 0
            steps = tab.h[i][valid]
            times = grid.taus[grid.K[i]] + np.concatenate([[0.0], np.cumsum(steps)])
            times[-1] = grid.taus[grid.K[i + 1]]
            st = states[: valid.sum() + 1, i]
            grads = problem.mean_grad(st)
            path = FlowPath(times, st, grads, problem.value(st), float(steps.max()))
            path.integrals = jb.integrals[0, grid.interval_slice(i)]
            flows.append(path)
    return flows, jb[0]


def run_discretized_process(flows, cset, grid, batch=None):
    """Discretized process, restarted from the flow at every break point.

    ``x^D_{k+1} = P_X(x^D_k - int_{tau_k}^{tau_{k+1}} grad fbar(x^C_t) dt)`` with
    ``x^D = x^C`` at each ``s_i``; integrals come from trapezoid quadrature on
    the flow's substeps. Pass either the list of flows of one run or a
    :class:`JumpingBatch` computed with ``integrals=True``.

    Returns
    -------
    xD : ndarray, shape (N + 1, n) or (R, N + 1, n)
        Values at ``tau_k``; at break points the restarted value.
    xD_end : ndarray, shape (I, n) or (R, I, n)
        Value reached at the end of each interval before the restart.
    """
    if batch is not None:
        integ = batch.integrals
        if integ is None:
            raise InvalidInput("jumping process was computed without integrals")
        starts = batch.xJ[:, grid.K[:-1]]
    else:
        integ = np.concatenate([f.integrals for f in flows])[None]
        starts = np.stack([f.states[0] for f in flows])[None]
    R, N, n = integ.shape
    xD = np.empty((R, N + 1, n))
    ends = np.empty((R, grid.n_intervals, n))
    for i in range(grid.n_intervals):
        x = starts[:, i]
        lo, hi = int(grid.K[i]), int(grid.K[i + 1])
        xD[:, lo] = x
        for k in range(lo, hi):
            x = cset.project(x - integ[:, k])
            if k + 1 < hi:
                xD[:, k + 1] = x
        ends[:, i] = x
    xD[:, N] = ends[:, -1]
    if batch is None:
        return xD[0], ends[0]
    return xD, ends
