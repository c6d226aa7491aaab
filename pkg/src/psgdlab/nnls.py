"""Small dense nonnegative least squares.

Lawson–Hanson active-set method. Used for distances to finitely generated
cones (``min_{lam >= 0} ||v - G^T lam||``) and, through the least-distance
reduction, for projections onto polytopes.
"""

import numpy as np

from .errors import InvalidInput, NonConvergence


def nnls(A, b, max_iter=None, tol=None):
    """Solve ``min ||A x - b||`` subject to ``x >= 0``.

    Parameters
    ----------
    A : array_like, shape (m, k)
    b : array_like, shape (m,)
    max_iter : int, optional
        Cap on outer iterations (default ``3 * k + 30``).
    tol : float, optional
        Dual feasibility tolerance on ``A^T (b - A x)``.

    Returns
    -------
    x : ndarray, shape (k,)
    rnorm : float
        Residual norm ``||A x - b||``.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or b.ndim != 1 or A.shape[0] != b.shape[0]:
        raise InvalidInput(f"nnls: incompatible shapes {A.shape} and {b.shape}")
    if not (np.isfinite(A).all() and np.isfinite(b).all()):
        raise InvalidInput("nnls: non-finite input")
    m, k = A.shape
    x = np.zeros(k)
    if k == 0:
        return x, float(np.linalg.norm(b))
    if max_iter is None:
        max_iter = 3 * k + 30
    if tol is None:
        scale = max(1.0, float(np.abs(A).max()) * max(1.0, float(np.abs(b).max())))
        tol = 10 * np.finfo(float).eps * max(m, k) * scale

    passive = np.zeros(k, dtype=bool)
    w = A.T @ (b - A @ x)
    n_iter = 0
    while (~passive).any():
        free = np.flatnonzero(~passive)
        j = free[np.argmax(w[free])]
        if w[j] <= tol:
            break
        n_iter += 1
        if n_iter > max_iter:
            raise NonConvergence(f"nnls did not converge in {max_iter} iterations")
        passive[j] = True
        s = _subproblem(A, b, passive)
        if s[j] <= 0.0:
            # roundoff: the entering column cannot improve the fit
            passive[j] = False
            w[j] = 0.0
            continue
        while (s[passive] <= 0.0).any():
            neg = passive & (s <= 0.0)
            step = np.min(x[neg] / (x[neg] - s[neg]))
            x = x + step * (s - x)
            passive &= x > 1e-15
            x[~passive] = 0.0
            s = _subproblem(A, b, passive)
        x = s
        w = A.T @ (b - A @ x)
    return x, float(np.linalg.norm(A @ x - b))


def _subproblem(A, b, passive):
    s = np.zeros(A.shape[1])
    if passive.any():
        s[passive] = np.linalg.lstsq(A[:, passive], b, rcond=None)[0]
    return s


def cone_distance(generators, v):
    """Euclidean distance from ``v`` to the cone generated by rows of ``generators``."""
    generators = np.atleast_2d(np.asarray(generators, dtype=float))
    v = np.asarray(v, dtype=float)
    if generators.size == 0:
        return float(np.linalg.norm(v))
    _, rnorm = nnls(generators.T, v)
    return rnorm


def cone_projection(generators, v):
    """Projection of ``v`` onto the cone generated by rows of ``generators``."""
    generators = np.atleast_2d(np.asarray(generators, dtype=float))
    v = np.asarray(v, dtype=float)
    if generators.size == 0:
        return np.zeros_like(v)
    lam, _ = nnls(generators.T, v)
    return generators.T @ lam


def least_distance(G, h):
    """Minimum-norm ``w`` with ``G w >= h`` (Lawson–Hanson LDP via NNLS).

    Returns ``None`` when the constraints are infeasible.
    """
    G = np.asarray(G, dtype=float)
    h = np.asarray(h, dtype=float)
    n = G.shape[1]
    E = np.vstack([G.T, h[None, :]])
    f = np.zeros(n + 1)
    f[-1] = 1.0
    u, _ = nnls(E, f)
    r = E @ u - f
    if abs(r[-1]) < 1e-14:
        return None
    return -r[:n] / r[-1]
