"""Closed-form constants and right-hand sides of the convergence bounds."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import InvalidInput, MissingConstant
from .problems import ASSUMPTIONS


@dataclass(frozen=True)
class BoundConstants:
    """Problem scales and the derived constants ``c1..c8``.

    ``c6`` is unused; the numbering follows the constant-step pair
    ``c5p = 2 (c7 + c8)`` and ``c6p = D u + c7 + c8``.
    """

    D: float
    r: float
    ell: float
    u: float
    n: int
    assumption: str
    sigma: float | None = None
    sigma_hat: float | None = None
    psi2: float | None = None

    def __post_init__(self):
        if self.assumption not in ASSUMPTIONS:
            raise InvalidInput(f"assumption must be one of {ASSUMPTIONS}")
        for name in ("D", "r", "ell"):
            if not getattr(self, name) > 0:
                raise InvalidInput(f"{name} must be positive")
        if not self.u >= 0:
            raise InvalidInput("u must be nonnegative")
        needed = {"A1": "sigma_hat", "A2": "sigma", "A3": "psi2"}[self.assumption]
        if getattr(self, needed) is None:
            raise MissingConstant(f"assumption {self.assumption} needs {needed}")

    @property
    def Du(self):
        return self.D * self.u

    @property
    def lead(self):
        """The common factor ``u + 2 u ell``."""
        return self.u + 2.0 * self.u * self.ell

    @property
    def c1(self):
        e = math.exp(self.ell)
        if self.assumption == "A1":
            return e * math.sqrt(self.n) * self.sigma_hat
        if self.assumption == "A2":
            return e * self.sigma
        return 2.0 * self.ell * e * self.psi2

    @property
    def c2(self):
        # sqrt(u) on its own keeps tiny u out of the subnormal range
        root = math.sqrt(2.0 * self.u) * math.sqrt((self.Du + self.D**2) / self.r)
        return (self.u + root) * math.exp(self.ell)

    def _sigma_hat(self):
        if self.sigma_hat is None:
            raise MissingConstant("high-probability constants need sigma_hat")
        return self.sigma_hat

    @property
    def c3(self):
        return 2.0 * math.sqrt(2.0) * math.exp(2.0 * self.ell) * self._sigma_hat() * self.D

    @property
    def c4(self):
        return 4.0 * math.exp(2.0 * self.ell) * self._sigma_hat() ** 2

    @property
    def c5(self):
        return math.exp(2.0 * self.ell) * (self.n + 1) * self._sigma_hat() ** 2

    @property
    def c7(self):
        return self.lead * self.c1

    @property
    def c8(self):
        return self.lead * self.c2

    @property
    def c5p(self):
        return 2.0 * (self.c7 + self.c8)

    @property
    def c6p(self):
        return self.Du + self.c7 + self.c8

    def replace(self, **kw):
        d = asdict(self)
        d.update(kw)
        return BoundConstants(**d)

    def report(self):
        """Inputs and derived constants as an ordered dict (absent values omitted)."""
        out = {k: v for k, v in asdict(self).items() if v is not None}
        out["Du"] = self.Du
        for name in ("c1", "c2", "c3", "c4", "c5", "c7", "c8", "c5p", "c6p"):
            try:
                out[name] = getattr(self, name)
            except MissingConstant:
                pass
        return out


def make_constants(problem, cset, noise=None, assumption=None):
    """Constants for ``problem`` on ``cset``.

    ``noise`` defaults to the problem's noise and ``assumption`` to the
    problem's tag.
    """
    noise = problem.noise if noise is None else noise
    assumption = problem.assumption if assumption is None else assumption
    nc = noise.constants()
    return BoundConstants(
        D=cset.diameter, r=cset.inner_radius, ell=problem.ell, u=problem.u(cset),
        n=cset.dim, assumption=assumption,
        sigma=nc.sigma, sigma_hat=nc.sigma_hat, psi2=nc.psi2,
    )


def _check_delta(delta):
    delta = float(delta)
    if not 0.0 < delta < 1.0:
        raise InvalidInput(f"delta must lie in (0, 1), got {delta}")
    return delta


def _check_alphas(alphas):
    a = np.atleast_1d(np.asarray(alphas, dtype=float))
    if a.size == 0 or np.any(a <= 0) or np.any(a > 0.5):
        raise InvalidInput("step sizes must lie in (0, 0.5]")
    return a


def h_bound(consts, interval_alphas, delta):
    """High-probability bound on the largest deviation within one interval."""
    a = _check_alphas(interval_alphas)
    L = math.log(2.0 / _check_delta(delta))
    s2 = float(np.sum(a**2))
    inner = consts.c3 * math.sqrt(L) * math.sqrt(s2) + (consts.c4 * L + consts.c5) * s2
    return math.sqrt(inner) + consts.c2 * math.sqrt(float(a.max()))


def deviation_bound(consts, grid):
    """Per-iterate bound on ``E[b_k]``.

    For ``k`` in interval ``i``:
    ``c1 sqrt(sum_{K(i) <= j < k} alpha_j^2) + c2 max_{K(i) <= j <= k} sqrt(alpha_j)``.
    """
    a = grid.alphas
    out = np.empty(grid.N)
    for i in range(grid.n_intervals):
        sl = grid.interval_slice(i)
        ai = a[sl]
        s2 = np.concatenate([[0.0], np.cumsum(ai**2)[:-1]])
        out[sl] = consts.c1 * np.sqrt(s2) + consts.c2 * np.sqrt(np.maximum.accumulate(ai))
    return out


def constant_step_deviation_bound(consts, alpha):
    """``(c1 + c2) sqrt(alpha)``."""
    return (consts.c1 + consts.c2) * math.sqrt(alpha)


def _interval_sums(grid):
    a = grid.alphas
    starts = grid.K[:-1]
    s2 = np.add.reduceat(a**2, starts)
    amax = np.maximum.reduceat(a, starts)
    return s2, amax


def theorem_rhs(consts, grid):
    """Bound on the weighted average of the squared Goldstein measure, in expectation."""
    s2, amax = _interval_sums(grid)
    tau = grid.taus[-1]
    total = np.sum(consts.c7 * np.sqrt(s2) + consts.c8 * np.sqrt(amax))
    return float((total + consts.Du) / tau)


def constant_step_rhs(consts, alpha, N):
    """``c5p sqrt(alpha) + c6p / (alpha N)``."""
    return consts.c5p * math.sqrt(alpha) + consts.c6p / (alpha * N)


def theorem_rhs_hp(consts, grid, deltas):
    """High-probability bound with per-interval failure levels ``deltas``.

    Returns ``(radii, bound)`` where ``radii[i] = h_i(deltas[i])``.
    """
    deltas = np.broadcast_to(np.asarray(deltas, dtype=float), (grid.n_intervals,))
    if np.any(deltas <= 0) or deltas.sum() >= 1:
        raise InvalidInput("deltas must be positive with sum below 1")
    radii = np.array([h_bound(consts, grid.interval_alphas(i), d) for i, d in enumerate(deltas)])
    bound = (consts.lead * radii.sum() + consts.Du) / grid.taus[-1]
    return radii, float(bound)


def q_value(consts, delta_hat):
    L = math.log(2.0 / _check_delta(delta_hat))
    root = math.sqrt(consts.c3 * math.sqrt(L) + consts.c4 * L + consts.c5)
    return consts.lead * root + consts.lead * consts.c8


def hp_rhs(consts, grid, alpha, N, delta):
    """Constant-step high-probability radius and bound.

    ``radius = q(delta / (2 alpha N + 1)) alpha^(1/4)`` and
    ``bound = 2 radius + (q + D u) / (alpha N)``.
    """
    delta = _check_delta(delta)
    if grid is not None and not (grid.is_constant and np.isclose(grid.alphas[0], alpha)):
        raise InvalidInput("hp_rhs needs a constant schedule matching alpha")
    q = q_value(consts, delta / (2.0 * alpha * N + 1.0))
    radius = q * alpha**0.25
    return radius, 2.0 * radius + (q + consts.Du) / (alpha * N)


def loglog_slope(x, y):
    """Least-squares slope of ``log y`` against ``log x`` and its standard error."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    if lx.size < 2:
        raise InvalidInput("a slope needs at least two points")
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, res, *_ = np.linalg.lstsq(A, ly, rcond=None)
    dof = lx.size - 2
    if dof > 0:
        resid = ly - A @ coef
        s2 = float(resid @ resid) / dof
        se = math.sqrt(s2 / float(np.sum((lx - lx.mean()) ** 2)))
    else:
        se = float("nan")
    return float(coef[0]), se
