"""Stationarity measures along runs and their weighted averages.

All series functions accept a single run (``xs`` of shape ``(N + 1, n)``) or a
batch (``(R, N + 1, n)``); measures are evaluated at ``x_0..x_{N-1}``, the
iterates that carry a step weight ``alpha_k``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, NonConvergence


@dataclass
class MeasureSeries:
    """Values ``m_k`` with their step weights.

    ``values`` has shape ``(N,)`` or ``(R, N)``; ``radius`` holds the Goldstein
    radius actually used (``None`` for other kinds).
    """

    kind: str
    values: np.ndarray
    alphas: np.ndarray
    radius: np.ndarray | None = None
    label: str = ""

    def __post_init__(self):
        if np.any(self.values < 0):
            raise InvalidInput("measure values must be nonnegative")
        if self.values.shape[-1] != self.alphas.size:
            raise InvalidInput("measure and weights disagree in length")


def _xs(run):
    xs = run.xs if hasattr(run, "xs") else np.asarray(run, dtype=float)
    return xs[..., :-1, :]


def goldstein_measure(run, radius, problem, cset, label=None):
    """``m_k = dist(-grad fbar(x_k), G_{r_k}(x_k))``.

    ``radius`` is a :class:`~psgdlab.flow.DeviationRecord` or
    :class:`~psgdlab.flow.JumpingBatch` (radius ``b_k``), an array of per-iterate
    radii, or a fixed scalar.
    """
    xs = _xs(run)
    if hasattr(radius, "b"):
        r = np.asarray(radius.b, dtype=float)
        default = "b_k"
    else:
        r = np.asarray(radius, dtype=float)
        default = "fixed" if r.ndim == 0 else "custom"
    r = np.broadcast_to(r, xs.shape[:-1])
    v = -problem.mean_grad(xs)
    vals = cset.goldstein_distance_batch(xs, r, v)
    return MeasureSeries("goldstein", vals, run.grid.alphas, np.array(r),
                         label or default)


def gradient_mapping_measure(run, problem, cset, use_stochastic=True):
    """``m_k = ||x_k - P_X(x_k - alpha_k g_k)|| / alpha_k`` with batch size one."""
    xs = _xs(run)
    g = problem.mean_grad(xs)
    if use_stochastic:
        g = g + run.zs
    a = run.grid.alphas[:, None]
    vals = np.linalg.norm(xs - cset.project(xs - a * g), axis=-1) / run.grid.alphas
    return MeasureSeries("gradient_mapping", vals, run.grid.alphas,
                         label="stochastic" if use_stochastic else "deterministic")


def tangent_residual_measure(run, problem, cset):
    """``m_k = ||P_{T_X(x_k)}(-grad fbar(x_k))||``."""
    xs = _xs(run)
    v = -problem.mean_grad(xs)
    flat_x = xs.reshape(-1, cset.dim)
    flat_v = v.reshape(-1, cset.dim)
    vals = np.array([cset.dist_to_normal_cone(x, w) for x, w in zip(flat_x, flat_v)])
    return MeasureSeries("tangent_residual", vals.reshape(xs.shape[:-1]), run.grid.alphas)


def weighted_average(series, grid=None, squared=True):
    """``(1 / tau_N) sum_k alpha_k m_k^p`` with ``p = 2`` if ``squared`` else 1.

    Reduces over the last axis, so a batch gives one value per run.
    """
    alphas = series.alphas if grid is None else grid.alphas
    if series.values.shape[-1] != alphas.size:
        raise InvalidInput("series and grid disagree in length")
    p = 2 if squared else 1
    return np.sum(alphas * series.values**p, axis=-1) / np.sum(alphas)


def running_weighted_average(series, squared=True):
    """Running version ``(1 / tau_{k+1}) sum_{j<=k} alpha_j m_j^p``."""
    p = 2 if squared else 1
    a = series.alphas
    return np.cumsum(a * series.values**p, axis=-1) / np.cumsum(a)


def moreau_grad_norm(problem, cset, x, lam, tol=1e-10, max_iter=1_000_000):
    """``||x - prox(x)|| / lam`` for the envelope of ``fbar + indicator``.

    The prox subproblem ``min_{y in X} fbar(y) + ||x - y||^2 / (2 lam)`` is
    solved by projected gradient with step ``lam / (1 + lam ell)``; it is
    strongly convex whenever ``lam`` times the weak-convexity modulus of
    ``fbar`` is below one.
    """
    lam = float(lam)
    if not lam > 0 or not tol > 0:
        raise InvalidInput("lam and tol must be positive")
    obj = problem.objective if hasattr(problem, "objective") else problem
    if lam * obj.weak_convexity >= 1.0:
        raise InvalidInput("lam times the weak-convexity modulus must be below 1")
    x = cset.check_point(np.atleast_1d(np.asarray(x, dtype=float)))
    ell = obj.lipschitz
    step = lam / (1.0 + lam * ell)
    y = x.copy()
    for _ in range(int(max_iter)):
        y_new = cset.project(y - step * (obj.grad(y) + (y - x) / lam))
        if np.linalg.norm(y_new - y) < tol:
            return float(np.linalg.norm(x - y_new) / lam)
        y = y_new
    raise NonConvergence(f"prox iteration did not settle in {max_iter} steps")
