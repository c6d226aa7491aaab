"""Projected SGD, step-size schedules and the break-point time grid."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, InvalidSchedule, NumericalFailure

#: relative tolerance of the inclusive test ``tau_j - s_i <= 1``
BREAK_TOL = 1e-10


# -- schedules -----------------------------------------------------------------

class StepSchedule:
    """Step sizes ``alpha_0, alpha_1, ...`` restricted to ``(0, 1/2]``."""

    def _raw(self, N):
        raise NotImplementedError

    def alphas(self, N):
        a = np.asarray(self._raw(int(N)), dtype=float)
        bad = ~((a > 0) & (a <= 0.5))
        if bad.any():
            k = int(np.flatnonzero(bad)[0])
            raise InvalidSchedule(f"alpha_{k} = {a[k]} is outside (0, 0.5]")
        return a

    def to_spec(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(StepSchedule):
    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha <= 0.5:
            raise InvalidSchedule("alpha must lie in (0, 0.5]")

    def _raw(self, N):
        return np.full(N, float(self.alpha))

    def to_spec(self):
        return {"constant": {"alpha": self.alpha}}


@dataclass(frozen=True)
class Harmonic(StepSchedule):
    """``alpha_k = a / (k + b)``."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise InvalidSchedule("harmonic schedule needs a > 0 and b > 0")

    def _raw(self, N):
        return self.a / (np.arange(N) + self.b)

    @property
    def robbins_monro(self):
        return True

    def to_spec(self):
        return {"harmonic": {"a": self.a, "b": self.b}}


@dataclass(frozen=True)
class Custom(StepSchedule):
    values: tuple

    def __init__(self, values):
        object.__setattr__(self, "values", tuple(float(v) for v in values))

    def _raw(self, N):
        if N > len(self.values):
            raise InvalidSchedule(f"custom schedule has {len(self.values)} steps, {N} requested")
        return np.array(self.values[:N])

    def to_spec(self):
        return {"custom": {"values": list(self.values)}}


def make_schedule(spec):
    (kind, args), = spec.items()
    if kind == "constant":
        return Constant(float(args["alpha"]))
    if kind == "harmonic":
        return Harmonic(float(args["a"]), float(args["b"]))
    if kind == "custom":
        return Custom(args["values"])
    raise InvalidInput(f"unknown schedule kind {kind!r}")


# -- time grid ------------------------------------------------------------------

@dataclass(frozen=True)
class TimeGrid:
    """Cumulative times and the break-point partition.

    Attributes
    ----------
    alphas : ndarray, shape (N,)
    taus : ndarray, shape (N + 1,)
        ``tau_k = sum_{j<k} alpha_j``.
    K : ndarray of int, shape (n_intervals + 1,)
        Iterate index of each break point; ``K[0] = 0`` and ``K[-1] = N``.
    zeta : ndarray of int, shape (N,)
        Interval containing iterate ``j``.
    """

    alphas: np.ndarray
    taus: np.ndarray
    K: np.ndarray
    zeta: np.ndarray

    @property
    def N(self):
        return self.alphas.size

    @property
    def breaks(self):
        return self.taus[self.K]

    @property
    def n_intervals(self):
        """Number of subintervals, ``chi(N) + 1``."""
        return self.K.size - 1

    @property
    def chi(self):
        return self.K.size - 2

    def interval_slice(self, i):
        return slice(int(self.K[i]), int(self.K[i + 1]))

    def interval_alphas(self, i):
        return self.alphas[self.interval_slice(i)]

    @property
    def is_constant(self):
        return bool(np.all(self.alphas == self.alphas[0]))


def build_time_grid(schedule, N):
    """Cumulative times and break points for ``N`` steps of ``schedule``.

    ``s_{i+1}`` is the largest ``tau_j`` with ``tau_j - s_i <= 1``; the
    comparison is inclusive up to a relative tolerance of ``1e-10``.
    """
    N = int(N)
    if N < 1:
        raise InvalidInput("N must be at least 1")
    alphas = schedule.alphas(N)
    if isinstance(schedule, Constant):
        taus = np.arange(N + 1) * float(schedule.alpha)
    else:
        taus = np.concatenate([[0.0], np.cumsum(alphas)])
    tol = BREAK_TOL * max(1.0, taus[-1])
    K = [0]
    while K[-1] < N:
        s = taus[K[-1]]
        j = int(np.searchsorted(taus, s + 1.0 + tol, side="right")) - 1
        K.append(min(j, N))
    K = np.array(K, dtype=np.int64)
    zeta = np.repeat(np.arange(K.size - 1), np.diff(K))
    return TimeGrid(alphas=alphas, taus=taus, K=K, zeta=zeta)


# -- runs ----------------------------------------------------------------------

@dataclass
class RunBatch:
    """Iterates of ``R`` independent runs sharing one schedule.

    ``xs`` has shape ``(R, N + 1, n)`` and ``zs`` has shape ``(R, N, n)``.
    """

    xs: np.ndarray
    zs: np.ndarray
    seeds: list
    grid: TimeGrid
    schedule: StepSchedule
    elapsed: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def R(self):
        return self.xs.shape[0]

    def __len__(self):
        return self.R

    def __getitem__(self, r):
        return RunRecord(self.xs[r], self.zs[r], self.seeds[r], self.grid, self.schedule,
                         self.elapsed / max(self.R, 1))

    def stochastic_grads(self, problem):
        return problem.mean_grad(self.xs[:, :-1]) + self.zs


@dataclass
class RunRecord:
    """One run: iterates ``x_0..x_N``, noise ``z_0..z_{N-1}`` and provenance."""

    xs: np.ndarray
    zs: np.ndarray
    seed: int | None
    grid: TimeGrid
    schedule: StepSchedule
    elapsed: float = 0.0

    @property
    def N(self):
        return self.grid.N

    def stochastic_grads(self, problem):
        return problem.mean_grad(self.xs[:-1]) + self.zs

    def as_batch(self):
        return RunBatch(self.xs[None], self.zs[None], [self.seed], self.grid, self.schedule,
                        self.elapsed)


def _iterate(problem, cset, grid, x0, zs):
    """The recursion for a block of runs; ``zs`` has shape (R, N, n)."""
    R, N, n = zs.shape
    xs = np.empty((R, N + 1, n))
    x = np.broadcast_to(x0, (R, n)).astype(float)
    xs[:, 0] = x
    alphas = grid.alphas
    for k in range(N):
        y = x - alphas[k] * (problem.mean_grad(x) + zs[:, k])
        if not np.isfinite(y).all():
            raise NumericalFailure(f"non-finite iterate at k = {k + 1}", index=k + 1)
        x = cset.project(y)
        xs[:, k + 1] = x
    return xs


def _check_x0(cset, x0):
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.shape != (cset.dim,):
        raise InvalidInput(f"x0 must have shape ({cset.dim},)")
    return cset.check_point(x0)


def run_psgd_batch(problem, cset, schedule, N, x0, seeds, threads=1, chunk=None):
    """Run projected SGD once per seed.

    Runs are advanced together in vectorized blocks; with ``threads > 1`` the
    blocks are spread over a thread pool. Output is ordered by seed index and
    does not depend on ``threads`` or ``chunk``.
    """
    x0 = _check_x0(cset, x0)
    grid = build_time_grid(schedule, N)
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise InvalidInput("at least one seed is required")
    start = time.perf_counter()
    zs = np.stack([problem.noise.spawn(s).draw(grid.N) for s in seeds])
    if chunk is None:
        chunk = max(1, -(-len(seeds) // max(1, threads)))
    blocks = [slice(i, i + chunk) for i in range(0, len(seeds), chunk)]
    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda b: _iterate(problem, cset, grid, x0, zs[b]), blocks))
    else:
        parts = [_iterate(problem, cset, grid, x0, zs[b]) for b in blocks]
    xs = np.concatenate(parts, axis=0)
    return RunBatch(xs, zs, seeds, grid, schedule, time.perf_counter() - start)


def run_psgd(problem, cset, schedule, N, x0, seed):
    """Single projected SGD run ``x_{k+1} = P_X(x_k - alpha_k grad f(x_k, z_k))``."""
    return run_psgd_batch(problem, cset, schedule, N, x0, [seed])[0]


def run_mean_process(problem, cset, schedule, N, x0):
    """Projected gradient descent on the mean objective."""
    x0 = _check_x0(cset, x0)
    grid = build_time_grid(schedule, N)
    start = time.perf_counter()
    zs = np.zeros((1, grid.N, cset.dim))
    xs = _iterate(problem, cset, grid, x0, zs)
    return RunRecord(xs[0], zs[0], None, grid, schedule, time.perf_counter() - start)


def thin_indices(grid, every):
    """Every ``every``-th iterate index plus all break-point indices."""
    idx = np.union1d(np.arange(0, grid.N + 1, int(every)), grid.K)
    return idx
