"""Convex constraint sets and their cone geometry.

Every set is compact, convex and contains a ball of positive radius around the
origin. Besides Euclidean projection each set answers normal/tangent cone
queries and builds the cone

    G_eps(x) = conv( union of N_X(y) over y in X with ||y - x|| <= eps ),

the Goldstein subdifferential of the indicator of X. The convex hull of a
union of convex cones is their Minkowski sum, so G_eps(x) is generated by the
normals of every face that comes within ``eps`` of ``x``.

Box and Ball operations are vectorized over leading axes; Polytope loops.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidInput, PointNotInSet
from .nnls import cone_distance, cone_projection, least_distance, nnls

#: absolute tolerance for set membership and face activity
ATOL = 1e-9


def _as_vector(y, dim=None, name="y"):
    y = np.asarray(y, dtype=float)
    if y.ndim == 0:
        y = y.reshape(1)
    if not np.isfinite(y).all():
        raise InvalidInput(f"{name} contains non-finite entries")
    if dim is not None and y.shape[-1] != dim:
        raise InvalidInput(f"{name} has dimension {y.shape[-1]}, expected {dim}")
    return y


def _signed_basis(plus, minus):
    """Rows +e_i for i in plus and -e_i for i in minus."""
    n = plus.shape[-1]
    eye = np.eye(n)
    return np.vstack([eye[plus], -eye[minus]])


@dataclass(frozen=True)
class ConeDescription:
    """A closed convex cone in one of three representations.

    Exactly one of ``degenerate_zero``, ``axis``/``half_angle`` (a cone of
    revolution) or ``generators`` (rows are unit vectors) is set.
    """

    dim: int
    generators: np.ndarray | None = None
    axis: np.ndarray | None = None
    half_angle: float | None = None
    degenerate_zero: bool = False

    def __post_init__(self):
        reps = [self.degenerate_zero, self.axis is not None,
                self.generators is not None and len(self.generators) > 0]
        if sum(reps) != 1:
            raise InvalidInput("cone needs exactly one representation")
        if self.generators is not None and len(self.generators):
            norms = np.linalg.norm(self.generators, axis=1)
            if np.abs(norms - 1.0).max() > 1e-12:
                raise InvalidInput("cone generators must have unit norm")

    @classmethod
    def zero(cls, dim):
        return cls(dim=dim, degenerate_zero=True)

    @property
    def is_product(self):
        """True when every generator is a signed coordinate vector."""
        if self.generators is None:
            return False
        g = self.generators
        return bool(np.all(np.count_nonzero(g, axis=1) == 1))

    def distance(self, v):
        """Euclidean distance from ``v`` to the cone."""
        v = _as_vector(v, self.dim, "v")
        if self.degenerate_zero:
            return float(np.linalg.norm(v))
        if self.axis is not None:
            return float(_revolution_distance(v, self.axis, np.cos(self.half_angle),
                                              np.sin(self.half_angle)))
        if self.is_product:
            plus = (self.generators > 0).any(axis=0)
            minus = (self.generators < 0).any(axis=0)
            return float(np.linalg.norm(_product_residual(v, plus, minus)))
        return cone_distance(self.generators, v)

    def project(self, v):
        """Euclidean projection of ``v`` onto the cone."""
        v = _as_vector(v, self.dim, "v")
        if self.degenerate_zero:
            return np.zeros_like(v)
        if self.axis is not None:
            return _revolution_project(v, self.axis, self.half_angle)
        return cone_projection(self.generators, v)


def _product_residual(v, plus, minus):
    """Residual of v against the product cone with per-coordinate sign freedom."""
    both = plus & minus
    res = np.where(plus, np.minimum(v, 0.0), np.where(minus, np.maximum(v, 0.0), v))
    return np.where(both, 0.0, res)


def _revolution_distance(v, axis, cos_t, sin_t):
    """Distance to {w : w.axis >= ||w|| cos(theta)}; broadcasts over leading axes."""
    t = np.sum(v * axis, axis=-1)
    nv = np.linalg.norm(v, axis=-1)
    s = np.sqrt(np.maximum(nv**2 - t**2, 0.0))
    inside = t >= nv * cos_t
    polar = t <= -nv * sin_t
    edge = s * cos_t - t * sin_t
    return np.where(inside, 0.0, np.where(polar, nv, np.maximum(edge, 0.0)))


def _revolution_project(v, axis, theta):
    t = float(v @ axis)
    nv = float(np.linalg.norm(v))
    if t >= nv * np.cos(theta):
        return v.copy()
    if t <= -nv * np.sin(theta):
        return np.zeros_like(v)
    perp = v - t * axis
    s = np.linalg.norm(perp)
    u = perp / s if s > 0 else np.zeros_like(v)
    ray = np.cos(theta) * axis + np.sin(theta) * u
    return float(v @ ray) * ray


class ConvexSet:
    """Common interface of the constraint families."""

    dim: int

    # -- to be provided by subclasses ---------------------------------
    def project(self, y):
        raise NotImplementedError

    def membership_violation(self, x):
        """Nonnegative scalar(s); zero iff ``x`` is in the set."""
        raise NotImplementedError

    def normal_cone_project(self, x, g):
        raise NotImplementedError

    def goldstein_cone(self, x, eps):
        raise NotImplementedError

    def normal_generators(self, p):
        """Unit generators of N_X(p) as rows (empty when p is interior)."""
        raise NotImplementedError

    def ray_extent(self, d):
        """Largest t with t*d in X, for directions d (leading axes broadcast)."""
        raise NotImplementedError

    def bounding_box(self):
        raise NotImplementedError

    def to_spec(self):
        raise NotImplementedError

    # -- shared ---------------------------------------------------------
    def contains(self, x, tol=ATOL):
        x = _as_vector(x, self.dim, "x")
        return self.membership_violation(x) <= tol

    def check_point(self, x, tol=ATOL):
        x = _as_vector(x, self.dim, "x")
        if not np.all(self.membership_violation(x) <= tol):
            raise PointNotInSet(f"point {x} lies outside {self!r}")
        return x

    def tangent_cone_project(self, x, g):
        g = _as_vector(g, self.dim, "g")
        return g - self.normal_cone_project(x, g)

    def dist_to_normal_cone(self, x, v):
        return np.linalg.norm(self.tangent_cone_project(x, v), axis=-1)

    def goldstein_distance(self, x, eps, v):
        v = _as_vector(v, self.dim, "v")
        return self.goldstein_cone(x, eps).distance(v)

    def goldstein_distance_batch(self, x, eps, v):
        """Goldstein distances for stacked points ``x`` (..., n), radii (...) and vectors (..., n)."""
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        eps = np.broadcast_to(np.asarray(eps, dtype=float), x.shape[:-1])
        out = np.empty(x.shape[:-1])
        for idx in np.ndindex(*x.shape[:-1]):
            out[idx] = self.goldstein_distance(x[idx], float(eps[idx]), v[idx])
        return out

    def normal_generators_batch(self, points):
        rows = [self.normal_generators(p) for p in np.asarray(points).reshape(-1, self.dim)]
        rows = [r for r in rows if len(r)]
        return np.vstack(rows) if rows else np.zeros((0, self.dim))

    def sample(self, rng, size):
        """Points of X: uniform directions from the origin, radial fraction U^(1/n)."""
        d = rng.standard_normal((size, self.dim))
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        t = self.ray_extent(d) * rng.random(size) ** (1.0 / self.dim)
        return t[:, None] * d

    @cached_property
    def diameter(self):
        return self._diameter()

    def _check_eps(self, eps):
        eps = float(eps)
        if not np.isfinite(eps) or eps < 0:
            raise InvalidInput(f"eps must be a nonnegative finite number, got {eps}")
        return eps


class Box(ConvexSet):
    """Axis-aligned box ``lower <= x <= upper``."""

    def __init__(self, lower, upper):
        lower = _as_vector(lower, name="lower")
        upper = _as_vector(upper, name="upper")
        if lower.shape != upper.shape or lower.ndim != 1:
            raise InvalidInput("lower and upper must be vectors of equal length")
        if not np.all(lower < upper):
            raise InvalidInput("box needs lower < upper in every coordinate")
        self.lower = lower
        self.upper = upper
        self.dim = lower.size
        self.inner_radius = float(min((-lower).min(), upper.min()))
        if not self.inner_radius > 0:
            raise InvalidInput("the origin must lie in the interior of the box")

    def __repr__(self):
        return f"Box(lower={self.lower.tolist()}, upper={self.upper.tolist()})"

    def _diameter(self):
        return float(np.linalg.norm(self.upper - self.lower))

    def to_spec(self):
        return {"box": {"lower": self.lower.tolist(), "upper": self.upper.tolist()}}

    def bounding_box(self):
        return self.lower.copy(), self.upper.copy()

    def project(self, y):
        y = _as_vector(y, self.dim)
        return np.clip(y, self.lower, self.upper)

    def membership_violation(self, x):
        v = np.maximum(self.lower - x, x - self.upper)
        return np.maximum(v.max(axis=-1), 0.0)

    def normal_cone_project(self, x, g):
        x = self.check_point(x)
        g = _as_vector(g, self.dim, "g")
        at_up = x >= self.upper - ATOL
        at_lo = x <= self.lower + ATOL
        return g - _product_residual(g, at_up, at_lo)

    def _active(self, x, eps):
        return self.upper - x <= eps + ATOL, x - self.lower <= eps + ATOL

    def goldstein_cone(self, x, eps):
        x = self.check_point(x)
        eps = self._check_eps(eps)
        plus, minus = self._active(x, eps)
        if not (plus.any() or minus.any()):
            return ConeDescription.zero(self.dim)
        return ConeDescription(dim=self.dim, generators=_signed_basis(plus, minus))

    def goldstein_distance_batch(self, x, eps, v):
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        eps = np.asarray(eps, dtype=float)[..., None]
        plus, minus = self._active(x, eps)
        return np.linalg.norm(_product_residual(v, plus, minus), axis=-1)

    def normal_generators(self, p):
        plus, minus = self._active(np.asarray(p, dtype=float), 0.0)
        return _signed_basis(plus, minus)

    def normal_generators_batch(self, points):
        points = np.asarray(points, dtype=float).reshape(-1, self.dim)
        plus, minus = self._active(points, 0.0)
        eye = np.eye(self.dim)
        gens = [eye[i] for i in range(self.dim) if plus[:, i].any()]
        gens += [-eye[i] for i in range(self.dim) if minus[:, i].any()]
        return np.array(gens) if gens else np.zeros((0, self.dim))

    def ray_extent(self, d):
        d = np.asarray(d, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(d > 0, self.upper / d, np.where(d < 0, self.lower / d, np.inf))
        return t.min(axis=-1)


class Ball(ConvexSet):
    """Euclidean ball ``||x - center|| <= radius``."""

    def __init__(self, center, radius):
        center = _as_vector(center, name="center")
        radius = float(radius)
        if center.ndim != 1:
            raise InvalidInput("center must be a vector")
        if not (np.isfinite(radius) and radius > 0):
            raise InvalidInput("ball radius must be positive")
        self.center = center
        self.radius = radius
        self.dim = center.size
        self.inner_radius = radius - float(np.linalg.norm(center))
        if not self.inner_radius > 0:
            raise InvalidInput("the origin must lie in the interior of the ball")

    def __repr__(self):
        return f"Ball(center={self.center.tolist()}, radius={self.radius})"

    def _diameter(self):
        return 2.0 * self.radius

    def to_spec(self):
        return {"ball": {"center": self.center.tolist(), "radius": self.radius}}

    def bounding_box(self):
        return self.center - self.radius, self.center + self.radius

    def project(self, y):
        y = _as_vector(y, self.dim)
        d = y - self.center
        rho = np.linalg.norm(d, axis=-1, keepdims=True)
        outside = rho > self.radius
        with np.errstate(divide="ignore", invalid="ignore"):
            scaled = self.center + d * (self.radius / rho)
        return np.where(outside, scaled, y)

    def membership_violation(self, x):
        return np.maximum(np.linalg.norm(x - self.center, axis=-1) - self.radius, 0.0)

    def normal_cone_project(self, x, g):
        x = self.check_point(x)
        g = _as_vector(g, self.dim, "g")
        d = x - self.center
        rho = np.linalg.norm(d, axis=-1, keepdims=True)
        on = rho >= self.radius - ATOL
        with np.errstate(divide="ignore", invalid="ignore"):
            nvec = np.where(on, d / rho, 0.0)
        coeff = np.maximum(np.sum(g * nvec, axis=-1, keepdims=True), 0.0)
        return coeff * nvec

    def _interval_active(self, x, eps):
        lo = self.center - self.radius
        hi = self.center + self.radius
        return hi - x <= eps + ATOL, x - lo <= eps + ATOL

    def _cap(self, x, eps):
        """(reachable, whole_space, cos_theta, axis) for the cap of boundary points within eps."""
        d = x - self.center
        rho = np.linalg.norm(d, axis=-1)
        R = self.radius
        reachable = R - rho <= eps + ATOL
        at_center = rho <= 1e-15
        with np.errstate(divide="ignore", invalid="ignore"):
            cos_t = (R**2 + rho**2 - eps**2) / (2.0 * R * rho)
            axis = d / rho[..., None]
        cos_t = np.clip(np.where(at_center, -1.0, cos_t), -1.0, 1.0)
        whole = reachable & (cos_t < 0.0)
        axis = np.where(at_center[..., None], 0.0, axis)
        return reachable, whole, cos_t, axis

    def goldstein_cone(self, x, eps):
        x = self.check_point(x)
        eps = self._check_eps(eps)
        if self.dim == 1:
            plus, minus = self._interval_active(x, eps)
            if not (plus.any() or minus.any()):
                return ConeDescription.zero(1)
            return ConeDescription(dim=1, generators=_signed_basis(plus, minus))
        reachable, whole, cos_t, axis = self._cap(x, eps)
        if not reachable:
            return ConeDescription.zero(self.dim)
        if whole:
            # a cap wider than a hemisphere positively spans the space
            full = np.ones(self.dim, dtype=bool)
            return ConeDescription(dim=self.dim, generators=_signed_basis(full, full))
        return ConeDescription(dim=self.dim, axis=axis, half_angle=float(np.arccos(cos_t)))

    def goldstein_distance_batch(self, x, eps, v):
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        eps = np.broadcast_to(np.asarray(eps, dtype=float), x.shape[:-1])
        if self.dim == 1:
            plus, minus = self._interval_active(x, eps[..., None])
            return np.linalg.norm(_product_residual(v, plus, minus), axis=-1)
        reachable, whole, cos_t, axis = self._cap(x, eps)
        sin_t = np.sqrt(np.maximum(1.0 - cos_t**2, 0.0))
        cap = _revolution_distance(v, axis, cos_t, sin_t)
        nv = np.linalg.norm(v, axis=-1)
        return np.where(~reachable, nv, np.where(whole, 0.0, cap))

    def normal_generators(self, p):
        p = np.asarray(p, dtype=float)
        d = p - self.center
        rho = np.linalg.norm(d)
        if rho >= self.radius - ATOL:
            return (d / rho)[None, :]
        return np.zeros((0, self.dim))

    def normal_generators_batch(self, points):
        points = np.asarray(points, dtype=float).reshape(-1, self.dim)
        d = points - self.center
        rho = np.linalg.norm(d, axis=1)
        on = rho >= self.radius - ATOL
        return d[on] / rho[on, None]

    def ray_extent(self, d):
        d = np.asarray(d, dtype=float)
        dd = np.sum(d * d, axis=-1)
        dc = np.sum(d * self.center, axis=-1)
        cc = float(self.center @ self.center)
        return (dc + np.sqrt(dc**2 - dd * (cc - self.radius**2))) / dd


class Polytope(ConvexSet):
    """Bounded polyhedron ``{y : A y <= b}`` with the origin in its interior."""

    def __init__(self, A, b):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = _as_vector(b, name="b")
        if not np.isfinite(A).all():
            raise InvalidInput("A contains non-finite entries")
        if A.shape[0] != b.size:
            raise InvalidInput("A and b disagree on the number of constraints")
        norms = np.linalg.norm(A, axis=1)
        if np.any(norms == 0):
            raise InvalidInput("polytope rows must be nonzero")
        self.A = A
        self.b = b
        self.dim = A.shape[1]
        self._row_norms = norms
        self._unit_rows = A / norms[:, None]
        self.inner_radius = float((b / norms).min())
        if not self.inner_radius > 0:
            raise InvalidInput("the origin must lie in the interior of the polytope")
        # bounded iff the rows positively span R^n
        for sign in (1.0, -1.0):
            for i in range(self.dim):
                e = np.zeros(self.dim)
                e[i] = sign
                if cone_distance(self._unit_rows, e) > 1e-9:
                    raise InvalidInput("polytope is unbounded")

    def __repr__(self):
        return f"Polytope(A={self.A.tolist()}, b={self.b.tolist()})"

    def to_spec(self):
        return {"polytope": {"A": self.A.tolist(), "b": self.b.tolist()}}

    @cached_property
    def vertices(self):
        """Vertex list by brute-force enumeration of n-row subsystems."""
        verts = []
        for rows in itertools.combinations(range(self.A.shape[0]), self.dim):
            sub = self.A[list(rows)]
            if abs(np.linalg.det(sub)) < 1e-12:
                continue
            v = np.linalg.solve(sub, self.b[list(rows)])
            if np.all(self.A @ v <= self.b + 1e-9):
                verts.append(v)
        return np.unique(np.round(np.array(verts), 12), axis=0)

    def _diameter(self):
        if self.dim <= 3:
            V = self.vertices
            diff = V[:, None, :] - V[None, :, :]
            return float(np.sqrt((diff**2).sum(-1)).max())
        lo, hi = self.bounding_box()
        return float(np.linalg.norm(hi - lo))

    def bounding_box(self):
        if self.dim <= 3:
            V = self.vertices
            return V.min(axis=0), V.max(axis=0)
        from scipy.optimize import linprog

        lo = np.empty(self.dim)
        hi = np.empty(self.dim)
        for i in range(self.dim):
            c = np.zeros(self.dim)
            c[i] = 1.0
            bounds = [(None, None)] * self.dim
            lo[i] = linprog(c, A_ub=self.A, b_ub=self.b, bounds=bounds).fun
            hi[i] = -linprog(-c, A_ub=self.A, b_ub=self.b, bounds=bounds).fun
        return lo, hi

    def membership_violation(self, x):
        slack = (np.asarray(x) @ self._unit_rows.T) - self.b / self._row_norms
        return np.maximum(slack.max(axis=-1), 0.0)

    def project(self, y):
        y = _as_vector(y, self.dim)
        if y.ndim == 1:
            return self._project_one(y)
        flat = y.reshape(-1, self.dim)
        out = np.array([self._project_one(row) for row in flat])
        return out.reshape(y.shape)

    def _project_one(self, y):
        A, b = self.A, self.b
        if np.all(A @ y <= b):
            return y.copy()
        # least-distance dual: min ||w|| s.t. -A w >= A y - b
        w = least_distance(-A, A @ y - b)
        x = y + w
        return self._polish(y, x)

    def _polish(self, y, x):
        """Re-solve on the detected active set; keeps the dual answer if KKT fails."""
        A, b = self.A, self.b
        scale = max(1.0, float(np.abs(y).max()))
        active = A @ x >= b - 1e-8 * scale * self._row_norms
        if not active.any():
            return x
        Aa = A[active]
        # equality-constrained least distance on the active rows
        sol = np.linalg.lstsq(Aa @ Aa.T, Aa @ y - b[active], rcond=None)[0]
        cand = y - Aa.T @ sol
        if np.all(sol >= -1e-12) and np.all(A @ cand <= b + 1e-12 * scale * self._row_norms):
            return cand
        return x

    def _active_rows(self, x, eps=0.0):
        return (self.A @ x) >= self.b - (eps + ATOL) * self._row_norms

    def normal_cone_project(self, x, g):
        x = self.check_point(x)
        g = _as_vector(g, self.dim, "g")
        if g.ndim > 1:
            xs = np.broadcast_to(x, g.shape)
            return np.array([self.normal_cone_project(xi, gi)
                             for xi, gi in zip(xs.reshape(-1, self.dim), g.reshape(-1, self.dim))]
                            ).reshape(g.shape)
        gens = self._unit_rows[self._active_rows(x)]
        if len(gens) == 0:
            return np.zeros_like(g)
        return cone_projection(gens, g)

    def goldstein_cone(self, x, eps):
        x = self.check_point(x)
        eps = self._check_eps(eps)
        gens = self._unit_rows[self._active_rows(x, eps)]
        if len(gens) == 0:
            return ConeDescription.zero(self.dim)
        return ConeDescription(dim=self.dim, generators=gens)

    def normal_generators(self, p):
        return self._unit_rows[self._active_rows(np.asarray(p, dtype=float))]

    def ray_extent(self, d):
        d = np.asarray(d, dtype=float)
        ad = d @ self.A.T
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(ad > 0, self.b / ad, np.inf)
        return t.min(axis=-1)


def make_set(spec):
    """Build a set from its configuration form, e.g. ``{"box": {...}}``."""
    if not isinstance(spec, dict) or len(spec) != 1:
        raise InvalidInput("set spec must have exactly one of box, ball, polytope")
    (kind, args), = spec.items()
    if kind == "box":
        return Box(args["lower"], args["upper"])
    if kind == "ball":
        return Ball(args["center"], args["radius"])
    if kind == "polytope":
        return Polytope(args["A"], args["b"])
    raise InvalidInput(f"unknown set kind {kind!r}")


# -- operation-style entry points -------------------------------------------

def project(cset, y):
    """Euclidean projection of ``y`` onto ``cset``."""
    return cset.project(y)


def normal_cone_project(cset, x, g):
    """Projection of ``g`` onto the normal cone of ``cset`` at ``x``."""
    return cset.normal_cone_project(x, g)


def tangent_cone_project(cset, x, g):
    """Projection of ``g`` onto the tangent cone, via ``g - normal part``."""
    return cset.tangent_cone_project(x, g)


def goldstein_cone(cset, x, eps):
    return cset.goldstein_cone(x, eps)


def goldstein_distance(cset, x, eps, v):
    """Distance from ``v`` to the Goldstein cone of radius ``eps`` at ``x``."""
    return cset.goldstein_distance(x, eps, v)


def dist_to_normal_cone(cset, x, v):
    return float(cset.dist_to_normal_cone(x, v))


def _pooled_generators(cset, points):
    gens = cset.normal_generators_batch(points)
    if len(gens) == 0:
        return gens
    gens = np.unique(np.round(gens, 13), axis=0)
    return gens / np.linalg.norm(gens, axis=1, keepdims=True)


def goldstein_distance_oracle(cset, x, eps, v, n_samples=10_000, seed=0, refine_rounds=4):
    """Sampling upper bound on :func:`goldstein_distance`.

    Half of the budget is spread over the ball of radius ``eps`` around ``x``
    (half of that on its sphere, half uniform inside). Each point ``y`` is
    projected onto the set, which keeps it within ``eps`` of ``x`` and lands it
    on the boundary with positive probability; the normal generators at the
    projected points are pooled and one NNLS gives the distance to their cone.

    The other half is spent in ``refine_rounds`` rounds of local search: the
    generators active in the current NNLS solution are traced back to the
    sample whose offset ``y - P(y)`` points most nearly along them, and new
    points on the ``eps``-sphere are drawn around that sample's direction at a
    shrinking angular scale. Every sample stays in the ``eps``-ball, so the
    result is always an upper bound and converges as ``n_samples`` grows.
    """
    if n_samples < 100:
        raise InvalidInput("the oracle needs at least 100 samples")
    x = cset.check_point(x)
    v = _as_vector(v, cset.dim, "v")
    eps = cset._check_eps(eps)
    rng = np.random.default_rng(seed)
    n0 = n_samples // 2
    d = rng.standard_normal((n0, cset.dim))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    radii = np.full(n0, eps)
    radii[n0 // 2:] *= rng.random(n0 - n0 // 2) ** (1.0 / cset.dim)
    y = x + radii[:, None] * d
    p = cset.project(y)
    gens = _pooled_generators(cset, np.vstack([x[None, :], p]))
    offsets = y - p
    per_round = (n_samples - n0) // max(refine_rounds, 1)
    scale = 0.05
    for r in range(refine_rounds + 1):
        if len(gens) == 0:
            return float(np.linalg.norm(v))
        lam, res = nnls(gens.T, v)
        active = gens[lam > 0]
        norms = np.linalg.norm(offsets, axis=1)
        moved = norms > 0
        if r == refine_rounds or res <= 1e-12 or len(active) == 0 or not moved.any():
            return res
        unit = offsets[moved] / norms[moved, None]
        best = np.argmax(unit @ active.T, axis=0)
        centers, center_offsets = d[moved][best], unit[best]
        m = max(1, per_round // len(centers))
        d_new = np.repeat(centers, m, axis=0) + scale * rng.standard_normal((m * len(centers),
                                                                             cset.dim))
        d_new /= np.linalg.norm(d_new, axis=1, keepdims=True)
        y_new = x + eps * d_new
        p_new = cset.project(y_new)
        fresh = _pooled_generators(cset, p_new)
        # the active generators stay in the pool, so the residual never increases
        gens = active if len(fresh) == 0 else np.vstack([active, fresh])
        d = np.vstack([centers, d_new])
        offsets = np.vstack([center_offsets, y_new - p_new])
        scale /= 4.0
