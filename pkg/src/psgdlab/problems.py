"""Objectives, noise processes and their constants.

A :class:`Problem` pairs a smooth mean objective with an additive noise
process, so the stochastic gradient is ``grad f(x, z) = grad fbar(x) + z``.
The scalar example ``f(x, z) = -x + x z`` with ``z = +-2`` fits this shape with
``fbar(x) = -x`` and is available as :func:`example41`.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import InvalidInput
from .geometry import Ball, Box, ConvexSet, Polytope

ASSUMPTIONS = ("A1", "A2", "A3")


# -- seeds ---------------------------------------------------------------------

_MASK = (1 << 64) - 1


def splitmix64(x):
    """One SplitMix64 output for the 64-bit input ``x``."""
    z = (int(x) + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def run_seed(master, r):
    """Seed of Monte Carlo run ``r``: ``splitmix64(master xor r)``."""
    return splitmix64((int(master) & _MASK) ^ int(r))


def run_seeds(master, count):
    return [run_seed(master, r) for r in range(count)]


# -- noise ---------------------------------------------------------------------

@dataclass(frozen=True)
class NoiseConstants:
    """Noise scales feeding the bound constants.

    ``sigma`` bounds the root mean square, ``sigma_hat`` is the per-direction
    sub-Gaussian parameter and ``psi2`` bounds the mixing sum. Absent values
    are ``None``.
    """

    sigma: float
    sigma_hat: float | None
    psi2: float | None

    def __post_init__(self):
        for name in ("sigma", "sigma_hat", "psi2"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, float(v))


class NoiseProcess:
    """Seeded sequential noise source.

    Subclasses implement ``_draw(count)``; ``draw(count)`` returns exactly what
    ``count`` successive ``next()`` calls would.
    """

    default_assumption = "A1"

    def __init__(self, dim=1, seed=0):
        if int(dim) < 1:
            raise InvalidInput("noise dimension must be positive")
        self.dim = int(dim)
        self.seed = int(seed)
        self.reset()

    def reset(self):
        self._rng = np.random.default_rng(self.seed)

    def next(self):
        return self._draw(1)[0]

    def draw(self, count):
        """Next ``count`` draws as an array of shape ``(count, dim)``."""
        return self._draw(int(count))

    def spawn(self, seed):
        """Fresh process with the same law and a new seed."""
        raise NotImplementedError

    def constants(self):
        raise NotImplementedError

    def to_spec(self):
        raise NotImplementedError

    def dump_csv(self, path, count):
        """Write the next ``count`` draws with columns ``k, z0, z1, ...``."""
        z = self.draw(count)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k"] + [f"z{i}" for i in range(self.dim)])
            for k, row in enumerate(z):
                w.writerow([k] + [repr(float(v)) for v in row])


class ZeroNoise(NoiseProcess):
    """The zero process; turns projected SGD into projected gradient descent."""

    def _draw(self, count):
        return np.zeros((count, self.dim))

    def spawn(self, seed):
        return ZeroNoise(self.dim, seed)

    def constants(self):
        return NoiseConstants(0.0, 0.0, 0.0)

    def to_spec(self):
        return {"zero": {}}


class GaussianIID(NoiseProcess):
    """IID ``N(0, sigma_hat^2 I)``."""

    def __init__(self, sigma_hat, dim=1, seed=0):
        if not float(sigma_hat) > 0:
            raise InvalidInput("sigma_hat must be positive")
        self.sigma_hat = float(sigma_hat)
        super().__init__(dim, seed)

    def _draw(self, count):
        return self.sigma_hat * self._rng.standard_normal((count, self.dim))

    def spawn(self, seed):
        return GaussianIID(self.sigma_hat, self.dim, seed)

    def constants(self):
        s = np.sqrt(self.dim) * self.sigma_hat
        return NoiseConstants(s, self.sigma_hat, s)

    def to_spec(self):
        return {"gaussian": {"sigma_hat": self.sigma_hat}}


class RademacherScaled(NoiseProcess):
    """Independent coordinates equal to ``+-magnitude`` with probability 1/2."""

    def __init__(self, magnitude, dim=1, seed=0):
        if not float(magnitude) > 0:
            raise InvalidInput("magnitude must be positive")
        self.magnitude = float(magnitude)
        super().__init__(dim, seed)

    def _draw(self, count):
        u = self._rng.random((count, self.dim))
        return np.where(u < 0.5, self.magnitude, -self.magnitude)

    def spawn(self, seed):
        return RademacherScaled(self.magnitude, self.dim, seed)

    def constants(self):
        s = np.sqrt(self.dim) * self.magnitude
        return NoiseConstants(s, self.magnitude, s)

    def to_spec(self):
        return {"rademacher": {"magnitude": self.magnitude}}


class BoundedIID(NoiseProcess):
    """IID uniform on the cube ``[-half_width, half_width]^n``.

    Bounded with RMS ``half_width * sqrt(n / 3)``; also sub-Gaussian with
    parameter ``half_width`` by Hoeffding's lemma.
    """

    default_assumption = "A2"

    def __init__(self, half_width, dim=1, seed=0):
        if not float(half_width) > 0:
            raise InvalidInput("half_width must be positive")
        self.half_width = float(half_width)
        super().__init__(dim, seed)

    def _draw(self, count):
        return self.half_width * (2.0 * self._rng.random((count, self.dim)) - 1.0)

    def spawn(self, seed):
        return BoundedIID(self.half_width, self.dim, seed)

    def constants(self):
        return NoiseConstants(self.half_width * np.sqrt(self.dim / 3.0), self.half_width,
                              self.half_width * np.sqrt(self.dim))

    def to_spec(self):
        return {"bounded": {"half_width": self.half_width}}


class FilteredAR1(NoiseProcess):
    """Coordinatewise AR(1) ``s_{k+1} = rho s_k + w_k``, ``w_k ~ N(0, sigma_hat^2)``, ``s_0 = 0``.

    The first draw is ``s_1``. Dependence decays geometrically, which gives
    the mixing bound ``Psi2 = sqrt(n) sigma_hat / ((1 - rho) sqrt(1 - rho^2))``.
    """

    default_assumption = "A3"

    def __init__(self, rho, sigma_hat, dim=1, seed=0):
        rho = float(rho)
        if not 0.0 < rho < 1.0:
            raise InvalidInput("rho must lie in (0, 1)")
        if not float(sigma_hat) > 0:
            raise InvalidInput("sigma_hat must be positive")
        self.rho = rho
        self.sigma_hat = float(sigma_hat)
        super().__init__(dim, seed)

    def reset(self):
        super().reset()
        self._state = np.zeros(self.dim)

    def _draw(self, count):
        from scipy.signal import lfilter

        w = self.sigma_hat * self._rng.standard_normal((count, self.dim))
        out = lfilter([1.0], [1.0, -self.rho], w, axis=0, zi=(self.rho * self._state)[None, :])[0]
        if count:
            self._state = out[-1].copy()
        return out

    def spawn(self, seed):
        return FilteredAR1(self.rho, self.sigma_hat, self.dim, seed)

    @property
    def stationary_std(self):
        return self.sigma_hat / np.sqrt(1.0 - self.rho**2)

    def constants(self):
        n = np.sqrt(self.dim)
        psi2 = n * self.sigma_hat / ((1.0 - self.rho) * np.sqrt(1.0 - self.rho**2))
        return NoiseConstants(n * self.stationary_std, None, psi2)

    def to_spec(self):
        return {"ar1": {"rho": self.rho, "sigma_hat": self.sigma_hat}}


def make_noise(spec, dim, seed=0):
    (kind, args), = spec.items()
    if kind == "zero":
        return ZeroNoise(dim, seed)
    if kind == "gaussian":
        return GaussianIID(args["sigma_hat"], dim, seed)
    if kind == "rademacher":
        return RademacherScaled(args["magnitude"], dim, seed)
    if kind == "bounded":
        return BoundedIID(args["half_width"], dim, seed)
    if kind == "ar1":
        return FilteredAR1(args["rho"], args["sigma_hat"], dim, seed)
    raise InvalidInput(f"unknown noise kind {kind!r}")


# -- objectives -----------------------------------------------------------------

def _matvec(P, x):
    # row-by-row sums so that batched and single evaluations agree bitwise
    return (x[..., None, :] * P).sum(axis=-1)


class Objective:
    """Smooth mean objective ``fbar``; methods broadcast over leading axes."""

    dim: int

    def value(self, x):
        raise NotImplementedError

    def grad(self, x):
        raise NotImplementedError

    @property
    def lipschitz(self):
        """Lipschitz constant of ``grad``."""
        raise NotImplementedError

    @property
    def weak_convexity(self):
        """Smallest ``m >= 0`` such that ``fbar + m/2 ||x||^2`` is convex."""
        return self.lipschitz

    def grad_bound(self, cset):
        """Upper bound on ``||grad fbar||`` over ``cset``."""
        return _grid_grad_bound(self, cset)

    def to_spec(self):
        raise NotImplementedError


@dataclass
class QuadraticCosine(Objective):
    """``fbar(x) = 1/2 x'Px + q'x + c sum_i cos(kappa x_i)``.

    With ``c = 0`` this is a quadratic, with ``P = 0`` and ``c = 0`` it is linear.
    """

    P: np.ndarray
    q: np.ndarray
    c: float = 0.0
    kappa: float = 0.0

    def __post_init__(self):
        self.P = np.atleast_2d(np.asarray(self.P, dtype=float))
        self.q = np.atleast_1d(np.asarray(self.q, dtype=float))
        n = self.q.size
        if self.P.shape != (n, n):
            raise InvalidInput(f"P must be {n}x{n}")
        if not np.allclose(self.P, self.P.T, atol=0, rtol=1e-12):
            raise InvalidInput("P must be symmetric")
        self.c = float(self.c)
        self.kappa = float(self.kappa)
        self.dim = n

    @classmethod
    def quadratic(cls, P, q=None):
        P = np.atleast_2d(np.asarray(P, dtype=float))
        return cls(P, np.zeros(P.shape[0]) if q is None else q)

    @classmethod
    def linear(cls, q):
        q = np.atleast_1d(np.asarray(q, dtype=float))
        return cls(np.zeros((q.size, q.size)), q)

    @property
    def is_affine_gradient(self):
        return self.c == 0.0 or self.kappa == 0.0

    def value(self, x):
        x = np.asarray(x, dtype=float)
        v = 0.5 * np.sum(x * _matvec(self.P, x), axis=-1) + np.sum(self.q * x, axis=-1)
        if self.c:
            v = v + self.c * np.sum(np.cos(self.kappa * x), axis=-1)
        return v

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        g = _matvec(self.P, x) + self.q
        if self.c:
            g = g - self.c * self.kappa * np.sin(self.kappa * x)
        return g

    @cached_property
    def _eig(self):
        return np.linalg.eigvalsh(self.P)

    @property
    def lipschitz(self):
        return float(np.abs(self._eig).max() + abs(self.c) * self.kappa**2)

    @property
    def weak_convexity(self):
        return float(max(0.0, -self._eig.min()) + abs(self.c) * self.kappa**2)

    def grad_bound(self, cset):
        if self.is_affine_gradient:
            # ||Px + q|| is convex, so its maximum sits at an extreme point
            if isinstance(cset, Box) and cset.dim <= 16:
                V = np.array(list(itertools.product(*zip(cset.lower, cset.upper))))
                return float(np.linalg.norm(self.grad(V), axis=1).max())
            if isinstance(cset, Polytope) and cset.dim <= 3:
                return float(np.linalg.norm(self.grad(cset.vertices), axis=1).max())
            if isinstance(cset, Ball):
                return float(np.linalg.norm(self.grad(cset.center))
                             + np.abs(self._eig).max() * cset.radius)
        return _grid_grad_bound(self, cset)

    def to_spec(self):
        return {"quadratic_cosine": {"P": self.P.tolist(), "q": self.q.tolist(),
                                     "c": self.c, "kappa": self.kappa}}


@dataclass
class CallbackObjective(Objective):
    """User-supplied objective; the caller vouches for the constants."""

    value_fn: object
    grad_fn: object
    dim: int
    lipschitz_const: float
    weak_convexity_const: float | None = None

    def value(self, x):
        return self.value_fn(np.asarray(x, dtype=float))

    def grad(self, x):
        return self.grad_fn(np.asarray(x, dtype=float))

    @property
    def lipschitz(self):
        return float(self.lipschitz_const)

    @property
    def weak_convexity(self):
        if self.weak_convexity_const is None:
            return float(self.lipschitz_const)
        return float(self.weak_convexity_const)

    def to_spec(self):
        return {"callback": {"lipschitz": self.lipschitz}}


def _grid_grad_bound(obj, cset, points_per_dim=None):
    """Max of ``||grad||`` on a grid over the bounding box plus a Lipschitz margin.

    Every point of the set is within ``spacing * sqrt(n) / 2`` of a grid node,
    so the margin makes this a valid upper bound. In more than three
    dimensions the cheaper bound ``||grad(0)|| + ell D`` is used.
    """
    n = cset.dim
    ell = obj.lipschitz
    if n > 3:
        return float(np.linalg.norm(obj.grad(np.zeros(n))) + ell * cset.diameter)
    if points_per_dim is None:
        points_per_dim = {1: 20001, 2: 401, 3: 81}[n]
    lo, hi = cset.bounding_box()
    axes = [np.linspace(a, b, points_per_dim) for a, b in zip(lo, hi)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    spacing = float(np.max((hi - lo) / (points_per_dim - 1)))
    gmax = float(np.linalg.norm(obj.grad(grid), axis=1).max())
    return gmax + ell * spacing * np.sqrt(n) / 2.0


def make_objective(spec):
    (kind, args), = spec.items()
    if kind == "quadratic_cosine":
        return QuadraticCosine(args["P"], args["q"], args.get("c", 0.0), args.get("kappa", 0.0))
    if kind == "quadratic":
        return QuadraticCosine.quadratic(args["P"], args.get("q"))
    if kind == "linear":
        return QuadraticCosine.linear(args["q"])
    raise InvalidInput(f"unknown objective kind {kind!r}")


# -- problems ------------------------------------------------------------------

@dataclass
class Problem:
    """Mean objective plus additive noise.

    ``ell`` is the larger of the objective's gradient Lipschitz constant and 1,
    because ``grad f(x, z) = grad fbar(x) + z`` is 1-Lipschitz in ``z``.
    """

    objective: Objective
    noise: NoiseProcess
    assumption: str | None = None
    name: str = "additive"
    _u_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.noise.dim != self.objective.dim:
            raise InvalidInput("noise and objective dimensions differ")
        if self.assumption is None:
            self.assumption = self.noise.default_assumption
        if self.assumption not in ASSUMPTIONS:
            raise InvalidInput(f"assumption must be one of {ASSUMPTIONS}")

    @property
    def dim(self):
        return self.objective.dim

    @property
    def ell(self):
        return max(self.objective.lipschitz, 1.0)

    def u(self, cset: ConvexSet):
        """Gradient bound on ``cset`` (cached per set)."""
        key = id(cset)
        if key not in self._u_cache:
            self._u_cache[key] = (cset, float(self.objective.grad_bound(cset)))
        return self._u_cache[key][1]

    def mean_grad(self, x):
        return self.objective.grad(x)

    def value(self, x):
        return self.objective.value(x)

    def stochastic_grad(self, x, z):
        return self.objective.grad(x) + np.asarray(z, dtype=float)

    def with_noise(self, noise):
        return Problem(self.objective, noise, self.assumption, self.name)

    def deterministic(self):
        return self.with_noise(ZeroNoise(self.dim))


def example41(seed=0):
    """``f(x, z) = -x + x z`` with ``z = +-2`` equiprobable, on ``[-1, 1]``."""
    return Problem(QuadraticCosine.linear([-1.0]), RademacherScaled(2.0, 1, seed), "A1",
                   name="example41")


def example41_set():
    return Box([-1.0], [1.0])


# -- free functions -------------------------------------------------------------

def mean_grad(problem, x):
    return problem.mean_grad(x)


def stochastic_grad(problem, x, z):
    return problem.stochastic_grad(x, z)


def next_noise(noise):
    return noise.next()


def noise_constants(noise):
    return noise.constants()
