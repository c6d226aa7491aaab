"""Independent reference computations used only by the tests."""

import itertools
import math

import numpy as np
from scipy.optimize import nnls as scipy_nnls

from psgdlab.geometry import Ball, Box, Polytope


def random_set(rng, dim, kind=None):
    kind = kind or rng.choice(["box", "ball", "polytope"])
    if kind == "box":
        lower = -rng.uniform(0.3, 2.0, dim)
        upper = rng.uniform(0.3, 2.0, dim)
        return Box(lower, upper)
    if kind == "ball":
        radius = rng.uniform(0.5, 2.0)
        center = rng.uniform(-1, 1, dim)
        center *= 0.6 * radius / max(np.linalg.norm(center), 1e-12) * rng.random()
        return Ball(center, radius)
    extra = rng.standard_normal((rng.integers(0, 4), dim))
    A = np.vstack([np.eye(dim), -np.eye(dim), extra])
    A = A * rng.uniform(0.5, 2.0, (A.shape[0], 1))
    b = rng.uniform(0.5, 2.0, A.shape[0])
    return Polytope(A, b)


def random_point(rng, cset, boundary_prob=0.5):
    """A point of the set; with probability ``boundary_prob`` on the boundary."""
    if rng.random() < boundary_prob:
        d = rng.standard_normal(cset.dim)
        return cset.project(d * 10.0 / np.linalg.norm(d))
    return cset.sample(rng, 1)[0]


def cone_distance_scipy(generators, v):
    if len(generators) == 0:
        return float(np.linalg.norm(v))
    G = np.asarray(generators, float).T
    # the residual scipy reports can be stale; recompute it
    return float(np.linalg.norm(G @ scipy_nnls(G, v)[0] - v))


def box_goldstein_reference(lower, upper, x, eps, v):
    """Distance via the face list and scipy's NNLS."""
    gens = []
    for i in range(len(x)):
        e = np.zeros(len(x))
        e[i] = 1.0
        if upper[i] - x[i] <= eps + 1e-9:
            gens.append(e)
        if x[i] - lower[i] <= eps + 1e-9:
            gens.append(-e)
    return cone_distance_scipy(gens, v)


def revolution_distance_reference(axis, theta, v, n_rays=20000, seed=0):
    """Distance to a cone of revolution from dense boundary rays plus the axis."""
    axis = np.asarray(axis, float)
    n = axis.size
    rng = np.random.default_rng(seed)
    if n == 2:
        perp = np.array([-axis[1], axis[0]])
        rays = [math.cos(theta) * axis + s * math.sin(theta) * perp for s in (1, -1)]
    else:
        w = rng.standard_normal((n_rays, n))
        w -= np.outer(w @ axis, axis)
        w /= np.linalg.norm(w, axis=1, keepdims=True)
        rays = math.cos(theta) * axis + math.sin(theta) * w
    return cone_distance_scipy(np.vstack([rays, axis[None]]), v)


def ball_cap_half_angle_sampled(R, x, eps, n=200001):
    """Largest angle to the axis of boundary points within ``eps`` of ``x`` (2-D)."""
    rho = np.linalg.norm(x)
    phi = np.linspace(-math.pi, math.pi, n)
    pts = R * np.stack([np.cos(phi), np.sin(phi)], axis=1)
    axis = x / rho
    near = np.linalg.norm(pts - x, axis=1) <= eps
    return float(np.max(np.arccos(np.clip(pts[near] @ axis, -1, 1))))


def polytope_vertices(A, b):
    n = A.shape[1]
    out = []
    for rows in itertools.combinations(range(A.shape[0]), n):
        S = A[list(rows)]
        if abs(np.linalg.det(S)) < 1e-12:
            continue
        v = np.linalg.solve(S, b[list(rows)])
        if np.all(A @ v <= b + 1e-9):
            out.append(v)
    return np.array(out)


# -- second formula path for the bound constants --------------------------------

def constants_factored(D, r, ell, u, n, sigma_hat=None, sigma=None, psi2=None, assumption="A1"):
    E, E2 = math.exp(ell), math.exp(ell) ** 2
    c1 = {"A1": lambda: E * math.sqrt(n) * sigma_hat,
          "A2": lambda: sigma * E,
          "A3": lambda: psi2 * E * ell * 2}[assumption]()
    c2 = E * u + E * math.sqrt(2 * u) * math.sqrt(D * (u + D) / r)
    out = {"c1": c1, "c2": c2, "c7": u * (1 + 2 * ell) * c1, "c8": u * (1 + 2 * ell) * c2}
    if sigma_hat is not None:
        out.update(c3=math.sqrt(8) * E2 * D * sigma_hat, c4=(2 * E * sigma_hat) ** 2,
                   c5=(n + 1) * (E * sigma_hat) ** 2)
    out["c5p"] = 2 * out["c7"] + 2 * out["c8"]
    out["c6p"] = out["c7"] + out["c8"] + u * D
    return out


def h_factored(c, alphas, delta):
    a = np.asarray(alphas, float)
    L = math.log(2) - math.log(delta)
    root_s2 = math.sqrt(float(a @ a))
    return math.sqrt(root_s2 * (c["c3"] * math.sqrt(L) + (c["c4"] * L + c["c5"]) * root_s2)) \
        + c["c2"] * float(np.sqrt(a).max())


def theorem_rhs_loop(c, taus, K, alphas, Du):
    total = 0.0
    for i in range(len(K) - 1):
        seg = alphas[K[i]:K[i + 1]]
        total += c["c7"] * math.sqrt(sum(x * x for x in seg)) + c["c8"] * max(math.sqrt(x)
                                                                             for x in seg)
    return (total + Du) / taus[-1]


def breaks_reference(alphas):
    """Break indices by the literal definition, with exact rationals when possible."""
    taus = [0.0]
    for a in alphas:
        taus.append(taus[-1] + a)
    K = [0]
    while K[-1] < len(alphas):
        s = taus[K[-1]]
        j = max(j for j in range(len(taus)) if taus[j] - s <= 1 + 1e-12)
        K.append(j)
    return K
