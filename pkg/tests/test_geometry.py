import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (ball_cap_half_angle_sampled, box_goldstein_reference, polytope_vertices,
                     random_point, random_set, revolution_distance_reference)
from psgdlab.errors import InvalidInput, PointNotInSet
from psgdlab.geometry import (Ball, Box, ConeDescription, Polytope, dist_to_normal_cone,
                              goldstein_cone, goldstein_distance, goldstein_distance_oracle,
                              make_set, normal_cone_project, project, tangent_cone_project)

I1 = Box([-1.0], [1.0])
SQ = Box([-1.0, -1.0], [1.0, 1.0])
DISK = Ball([0.0, 0.0], 1.0)


# -- projection -------------------------------------------------------------------

def test_box_clamp():
    assert project(I1, [1.3]) == pytest.approx([1.0])


@pytest.mark.parametrize("cset", [I1, SQ, DISK, Polytope([[1, 1], [-1, 0], [0, -1]], [1, 1, 1])])
def test_identity_on_set(cset):
    rng = np.random.default_rng(1)
    y = cset.sample(rng, 20)
    assert np.array_equal(cset.project(y), y)


def test_ball_radial():
    assert project(DISK, [3.0, 4.0]) == pytest.approx([0.6, 0.8])


def test_projection_rejects_nonfinite():
    with pytest.raises(InvalidInput):
        project(SQ, [np.nan, 0.0])
    with pytest.raises(InvalidInput):
        project(DISK, [np.inf, 0.0])


@pytest.mark.parametrize("kind", ["box", "ball", "polytope"])
@pytest.mark.parametrize("dim", [1, 2, 3, 5])
def test_projection_variational_inequality(kind, dim):
    rng = np.random.default_rng(dim)
    for _ in range(20):
        cset = random_set(rng, dim, kind)
        y = 3.0 * rng.standard_normal(dim)
        x = cset.project(y)
        assert cset.contains(x)
        z = cset.sample(rng, 500)
        lhs = (z - x) @ (y - x)
        scale = np.linalg.norm(y - x) * np.linalg.norm(z - x, axis=1)
        assert np.all(lhs <= 1e-9 * scale + 1e-15)


def test_polytope_projection_against_vertices():
    # the inequality over all vertices implies it over the whole polytope
    rng = np.random.default_rng(5)
    for _ in range(200):
        P = random_set(rng, 2, "polytope")
        V = polytope_vertices(P.A, P.b)
        y = 4.0 * rng.standard_normal(2)
        x = P.project(y)
        assert np.all((V - x) @ (y - x) <= 1e-10 * np.linalg.norm(y - x) * 10)


# -- normal and tangent cones ---------------------------------------------------------

def test_normal_cone_examples():
    assert normal_cone_project(I1, [1.0], [1.0]) == pytest.approx([1.0])
    assert normal_cone_project(I1, [0.0], [1.0]) == pytest.approx([0.0])
    # corner of the square: normal cone is the closed negative orthant
    assert normal_cone_project(SQ, [-1.0, -1.0], [-2.0, 3.0]) == pytest.approx([-2.0, 0.0])


def test_tangent_cone_examples():
    assert tangent_cone_project(I1, [1.0], [1.0]) == pytest.approx([0.0])
    assert tangent_cone_project(I1, [0.5], [1.0]) == pytest.approx([1.0])
    assert tangent_cone_project(DISK, [1.0, 0.0], [1.0, 1.0]) == pytest.approx([0.0, 1.0])


def test_tangent_ball_by_sampling():
    # tangent cone at (1, 0) is the halfspace w0 <= 0
    g = np.array([1.0, 1.0])
    t = np.linspace(-5, 5, 2001)
    W = np.stack(np.meshgrid(np.linspace(-5, 0, 501), t), -1).reshape(-1, 2)
    best = W[np.argmin(np.linalg.norm(W - g, axis=1))]
    assert tangent_cone_project(DISK, [1.0, 0.0], g) == pytest.approx(best, abs=1e-2)


def test_point_outside_raises():
    with pytest.raises(PointNotInSet):
        normal_cone_project(I1, [1.1], [1.0])
    with pytest.raises(PointNotInSet):
        goldstein_cone(DISK, [1.0, 1.0], 0.1)


@pytest.mark.parametrize("kind", ["box", "ball", "polytope"])
def test_moreau_and_pythagoras(kind):
    rng = np.random.default_rng(11)
    for _ in range(200):
        dim = int(rng.integers(1, 5))
        cset = random_set(rng, dim, kind)
        x = random_point(rng, cset)
        g = rng.standard_normal(dim)
        n = cset.normal_cone_project(x, g)
        t = cset.tangent_cone_project(x, g)
        assert np.array_equal(t + n, g) or np.allclose(t + n, g, atol=1e-15, rtol=0)
        assert abs(t @ n) <= 1e-9 * max(1.0, g @ g)
        assert g @ t == pytest.approx(t @ t, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("cset", [SQ, Polytope([[1, 1], [-1, 0], [0, -1]], [1, 1, 1])])
def test_limit_law_exact_for_polyhedra(cset):
    rng = np.random.default_rng(2)
    for _ in range(50):
        x = random_point(rng, cset, boundary_prob=1.0)
        g = rng.standard_normal(2)
        t = cset.tangent_cone_project(x, g)
        a = 1e-6
        assert (cset.project(x + a * g) - x) / a == pytest.approx(t, abs=1e-6)


def test_limit_law_ball():
    x = np.array([1.0, 0.0])
    g = np.array([1.0, 2.0])
    t = DISK.tangent_cone_project(x, g)
    errs = [np.linalg.norm((DISK.project(x + a * g) - x) / a - t) for a in (1e-1, 1e-2, 1e-3)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-2


def test_dist_to_normal_cone_examples():
    assert dist_to_normal_cone(I1, [1.0], [1.0]) == 0.0
    assert dist_to_normal_cone(I1, [0.3], [1.0]) == 1.0
    assert dist_to_normal_cone(DISK, [1.0, 0.0], [2.0, 0.0]) == 0.0


# -- Goldstein cone ----------------------------------------------------------------

def test_goldstein_cone_box():
    c = goldstein_cone(I1, [0.95], 0.1)
    assert c.generators.tolist() == [[1.0]]
    assert goldstein_cone(I1, [0.0], 0.1).degenerate_zero


def test_goldstein_cone_ball_angle():
    c = goldstein_cone(DISK, [0.95, 0.0], 0.1)
    assert c.axis == pytest.approx([1.0, 0.0])
    expected = math.acos((1 + 0.9025 - 0.01) / 1.9)
    assert c.half_angle == pytest.approx(expected, rel=1e-12)
    assert c.half_angle == pytest.approx(0.0889, abs=1e-4)
    assert c.half_angle == pytest.approx(
        ball_cap_half_angle_sampled(1.0, np.array([0.95, 0.0]), 0.1), abs=1e-4)


def test_goldstein_cone_ball_unreachable_and_whole():
    assert goldstein_cone(DISK, [0.5, 0.0], 0.1).degenerate_zero
    c = goldstein_cone(DISK, [0.2, 0.0], 1.5)
    assert c.distance(np.array([-3.0, 7.0])) == 0.0


def test_goldstein_distance_examples():
    assert goldstein_distance(I1, [0.95], 0.1, [1.0]) == 0.0
    assert goldstein_distance(I1, [0.8], 0.1, [1.0]) == 1.0
    x, v = np.array([-0.95, 0.0]), np.array([-1.0, 1.0])
    assert goldstein_distance(SQ, x, 0.1, v) == pytest.approx(1.0)
    assert goldstein_distance_oracle(SQ, x, 0.1, v) == pytest.approx(1.0)


def test_negative_eps_rejected():
    with pytest.raises(InvalidInput):
        goldstein_cone(I1, [0.0], -0.1)


def test_cone_description_invariants():
    with pytest.raises(InvalidInput):
        ConeDescription(dim=2)
    with pytest.raises(InvalidInput):
        ConeDescription(dim=2, generators=np.array([[2.0, 0.0]]))
    with pytest.raises(InvalidInput):
        ConeDescription(dim=1, generators=np.array([[1.0]]), degenerate_zero=True)


@pytest.mark.parametrize("dim", [1, 2, 3, 4])
def test_box_distance_matches_reference(dim):
    rng = np.random.default_rng(dim)
    for _ in range(100):
        B = random_set(rng, dim, "box")
        x = random_point(rng, B)
        eps = float(rng.choice([0.0, 0.01, 0.1, 0.5]))
        v = rng.standard_normal(dim)
        ref = box_goldstein_reference(B.lower, B.upper, x, eps, v)
        assert goldstein_distance(B, x, eps, v) == pytest.approx(ref, abs=1e-10)


@pytest.mark.parametrize("dim", [2, 3])
def test_ball_distance_matches_reference(dim):
    rng = np.random.default_rng(10 + dim)
    for _ in range(30):
        B = random_set(rng, dim, "ball")
        x = B.project(B.center + 5 * rng.standard_normal(dim))
        x = B.center + (x - B.center) * rng.uniform(0.9, 1.0)
        eps = float(rng.uniform(0.05, 0.5))
        v = rng.standard_normal(dim)
        c = B.goldstein_cone(x, eps)
        got = goldstein_distance(B, x, eps, v)
        if c.axis is not None:
            ref = revolution_distance_reference(c.axis, c.half_angle, v)
            assert got <= ref + 1e-9
            assert got == pytest.approx(ref, abs=2e-3)


@pytest.mark.parametrize("kind", ["box", "ball", "polytope"])
def test_batch_agrees_with_single(kind):
    rng = np.random.default_rng(3)
    cset = random_set(rng, 2, kind)
    X = np.array([random_point(rng, cset) for _ in range(40)])
    eps = rng.uniform(0, 0.5, 40)
    V = rng.standard_normal((40, 2))
    batch = cset.goldstein_distance_batch(X, eps, V)
    single = [cset.goldstein_distance(x, e, v) for x, e, v in zip(X, eps, V)]
    assert batch == pytest.approx(single, abs=1e-12)


def test_one_dimensional_ball_is_an_interval():
    B = Ball([0.2], 1.0)
    Ib = Box([-0.8], [1.2])
    for x in (-0.8, -0.75, 0.0, 1.15, 1.2):
        for v in (-1.0, 1.0):
            assert goldstein_distance(B, [x], 0.1, [v]) == goldstein_distance(Ib, [x], 0.1, [v])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from(["box", "ball", "polytope"]))
def test_monotone_in_eps_and_bounded_by_norm(seed, kind):
    rng = np.random.default_rng(seed)
    cset = random_set(rng, int(rng.integers(1, 4)), kind)
    x = random_point(rng, cset)
    v = rng.standard_normal(cset.dim)
    vals = [goldstein_distance(cset, x, e, v) for e in (0.0, 0.01, 0.1, 0.5, 1.0)]
    assert vals[0] <= np.linalg.norm(v) + 1e-12
    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
    assert vals[0] == pytest.approx(dist_to_normal_cone(cset, x, v), abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31), st.floats(0.01, 100.0))
def test_scale_covariance(seed, c):
    rng = np.random.default_rng(seed)
    cset = random_set(rng, 2)
    x = random_point(rng, cset)
    v = rng.standard_normal(2)
    d1 = goldstein_distance(cset, x, 0.2, c * v)
    d2 = c * goldstein_distance(cset, x, 0.2, v)
    assert d1 == pytest.approx(d2, rel=1e-9, abs=1e-12)


def test_large_eps_contains_every_normal():
    rng = np.random.default_rng(4)
    for kind in ("box", "polytope"):
        cset = random_set(rng, 2, kind)
        x = random_point(rng, cset)
        c = cset.goldstein_cone(x, cset.diameter)
        for p in cset.sample(rng, 20) * 0 + [cset.project(5 * rng.standard_normal(2))
                                              for _ in range(20)]:
            for g in cset.normal_generators(p):
                assert c.distance(g) <= 1e-9


# -- sampling oracle -----------------------------------------------------------------

def test_oracle_interior_zero_eps():
    v = np.array([0.3, -0.4])
    assert goldstein_distance_oracle(SQ, [0.1, 0.2], 0.0, v) == pytest.approx(0.5)


def test_oracle_finds_face():
    assert goldstein_distance_oracle(I1, [0.95], 0.1, [1.0], n_samples=10_000) <= 1e-9


def test_oracle_needs_samples():
    with pytest.raises(InvalidInput):
        goldstein_distance_oracle(I1, [0.0], 0.1, [1.0], n_samples=50)


def test_oracle_deterministic():
    a = goldstein_distance_oracle(DISK, [0.9, 0.1], 0.2, [1.0, 1.0], seed=7)
    b = goldstein_distance_oracle(DISK, [0.9, 0.1], 0.2, [1.0, 1.0], seed=7)
    assert a == b


@pytest.mark.parametrize("kind", ["box", "ball", "polytope"])
def test_oracle_dominates_exact(kind):
    rng = np.random.default_rng(8)
    for _ in range(30):
        cset = random_set(rng, int(rng.integers(1, 4)), kind)
        x = random_point(rng, cset)
        eps = float(rng.choice([0.01, 0.1, 0.5]))
        v = rng.standard_normal(cset.dim)
        exact = goldstein_distance(cset, x, eps, v)
        oracle = goldstein_distance_oracle(cset, x, eps, v, n_samples=2000, seed=1)
        assert exact <= oracle + 1e-9


def test_oracle_converges_on_boxes():
    rng = np.random.default_rng(9)
    for _ in range(5):
        B = random_set(rng, 3, "box")
        x = random_point(rng, B)
        v = rng.standard_normal(3)
        exact = goldstein_distance(B, x, 0.1, v)
        assert goldstein_distance_oracle(B, x, 0.1, v, n_samples=100_000) == \
            pytest.approx(exact, abs=1e-3)


# -- construction --------------------------------------------------------------------

def test_construction_errors():
    with pytest.raises(InvalidInput):
        Box([0.0], [1.0])
    with pytest.raises(InvalidInput):
        Box([1.0], [-1.0])
    with pytest.raises(InvalidInput):
        Ball([2.0, 0.0], 1.0)
    with pytest.raises(InvalidInput):
        Ball([0.0], 0.0)
    with pytest.raises(InvalidInput):
        Polytope([[1.0, 0.0], [0.0, 1.0]], [1.0, 1.0])
    with pytest.raises(InvalidInput):
        Polytope([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]], [1.0, 1.0, 1.0, 0.0])


def test_diameter_and_inner_radius():
    assert SQ.diameter == pytest.approx(2 * math.sqrt(2))
    assert DISK.diameter == 2.0
    P = Polytope([[1, 1], [-1, 0], [0, -1]], [1, 1, 1])
    assert P.diameter == pytest.approx(math.sqrt(18))
    assert P.inner_radius == pytest.approx(1 / math.sqrt(2))
    P4 = Polytope(np.vstack([np.eye(4), -np.eye(4)]), np.ones(8))
    assert P4.diameter >= 4.0 - 1e-9


def test_make_set_roundtrip():
    for cset in (SQ, DISK, Polytope([[1, 1], [-1, 0], [0, -1]], [1, 1, 1])):
        again = make_set(cset.to_spec())
        assert type(again) is type(cset)
        assert again.to_spec() == cset.to_spec()
    with pytest.raises(InvalidInput):
        make_set({"cube": {}})
