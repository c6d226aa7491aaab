import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import constants_factored, h_factored, theorem_rhs_loop
from psgdlab.bounds import (BoundConstants, constant_step_deviation_bound, constant_step_rhs,
                            deviation_bound, h_bound, hp_rhs, loglog_slope, make_constants,
                            q_value, theorem_rhs, theorem_rhs_hp)
from psgdlab.engine import Constant, Custom, Harmonic, build_time_grid
from psgdlab.errors import InvalidInput, MissingConstant
from psgdlab.problems import FilteredAR1, example41, example41_set

E = math.e

scales = st.fixed_dictionaries({
    "D": st.floats(0.1, 10), "r": st.floats(0.05, 5), "ell": st.floats(1.0, 4.0),
    "u": st.floats(0.0, 10), "n": st.integers(1, 10), "sigma_hat": st.floats(0.01, 5),
})


def _consts(**kw):
    base = dict(D=2.0, r=1.0, ell=1.0, u=1.0, n=1, assumption="A1", sigma=1.0, sigma_hat=1.0,
                psi2=2.0)
    base.update(kw)
    return BoundConstants(**base)


def test_constant_examples():
    assert _consts().c1 == pytest.approx(E, rel=1e-15)
    assert _consts(assumption="A3").c1 == pytest.approx(4 * E, rel=1e-15)
    assert _consts(assumption="A2", sigma=0.5).c1 == pytest.approx(0.5 * E)
    assert _consts().c7 == pytest.approx(3 * E, rel=1e-15)
    assert _consts().c2 == pytest.approx((1 + math.sqrt(12)) * E)


def test_example_problem_constants():
    c = make_constants(example41(), example41_set())
    assert (c.D, c.r, c.ell, c.u, c.n) == (2.0, 1.0, 1.0, 1.0, 1)
    assert c.c1 == pytest.approx(2 * E)
    assert c.c3 == pytest.approx(2 * math.sqrt(2) * E**2 * 2 * 2)


@settings(max_examples=200, deadline=None)
@given(scales, st.sampled_from(["A1", "A2", "A3"]))
def test_constants_two_paths(s, assumption):
    kw = dict(s, sigma=0.7 * s["sigma_hat"], psi2=1.3 * s["sigma_hat"])
    c = BoundConstants(assumption=assumption, **kw)
    ref = constants_factored(assumption=assumption, **kw)
    for name, val in ref.items():
        assert getattr(c, name) == pytest.approx(val, rel=1e-12, abs=1e-300)


@settings(max_examples=100, deadline=None)
@given(scales, st.lists(st.floats(1e-4, 0.5), min_size=1, max_size=20), st.floats(1e-6, 0.99))
def test_h_two_paths(s, alphas, delta):
    c = BoundConstants(assumption="A1", **s)
    ref = h_factored(constants_factored(**s), alphas, delta)
    assert h_bound(c, alphas, delta) == pytest.approx(ref, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(scales, st.lists(st.floats(1e-3, 0.5), min_size=1, max_size=60))
def test_theorem_rhs_two_paths(s, alphas):
    c = BoundConstants(assumption="A1", **s)
    g = build_time_grid(Custom(alphas), len(alphas))
    ref = theorem_rhs_loop(constants_factored(**s), g.taus, g.K, g.alphas, c.Du)
    assert theorem_rhs(c, g) == pytest.approx(ref, rel=1e-12)


def test_h_monotone():
    c = _consts()
    a = [0.1, 0.05, 0.2]
    vals = [h_bound(c, a, d) for d in (0.5, 0.1, 0.01, 1e-6)]
    assert all(x < y for x, y in zip(vals, vals[1:]))
    assert h_bound(c, a + [0.01], 0.1) > h_bound(c, a, 0.1)


@pytest.mark.parametrize("delta", [0.0, 1.0, -0.1, 1.5])
def test_delta_domain(delta):
    with pytest.raises(InvalidInput, match=r"delta must lie in \(0, 1\)"):
        h_bound(_consts(), [0.1], delta)
    with pytest.raises(InvalidInput):
        q_value(_consts(), delta)


def test_step_domain():
    with pytest.raises(InvalidInput):
        h_bound(_consts(), [0.6], 0.1)
    with pytest.raises(InvalidInput):
        h_bound(_consts(), [], 0.1)


@settings(max_examples=100, deadline=None)
@given(scales, st.sampled_from(["D", "u", "ell", "sigma_hat"]), st.floats(1.01, 3.0))
def test_theorem_rhs_monotone(s, name, factor):
    g = build_time_grid(Harmonic(1.0, 2.0), 200)
    c = BoundConstants(assumption="A1", **s)
    bigger = c.replace(**{name: getattr(c, name) * factor})
    assert theorem_rhs(bigger, g) >= theorem_rhs(c, g)
    assert hp_rhs(bigger, None, 0.01, 1000, 0.1)[1] >= hp_rhs(c, None, 0.01, 1000, 0.1)[1]


@pytest.mark.parametrize("alpha", [0.5, 0.25, 0.1, 0.01])
@pytest.mark.parametrize("N", [1, 10, 1000])
def test_constant_step_forms_dominate(alpha, N):
    c = _consts(u=1.3, ell=2.0)
    g = build_time_grid(Constant(alpha), N)
    assert theorem_rhs(c, g) <= constant_step_rhs(c, alpha, N) * (1 + 1e-12)
    assert np.all(deviation_bound(c, g) <= constant_step_deviation_bound(c, alpha) + 1e-12)


def test_deviation_bound_shape():
    c = _consts()
    g = build_time_grid(Constant(0.25), 10)
    d = deviation_bound(c, g)
    assert d.shape == (10,)
    # first iterate of each interval carries only the c2 term
    np.testing.assert_allclose(d[g.K[:-1]], c.c2 * 0.5)
    assert d[1] == pytest.approx(c.c1 * 0.25 + c.c2 * 0.5)


def test_theorem_rhs_hp():
    c = _consts()
    g = build_time_grid(Constant(0.25), 12)
    radii, bound = theorem_rhs_hp(c, g, 0.1 / g.n_intervals)
    assert radii.shape == (g.n_intervals,)
    assert radii[0] == pytest.approx(h_bound(c, [0.25] * 4, 0.1 / 3))
    assert bound == pytest.approx((c.lead * radii.sum() + c.Du) / 3.0)
    with pytest.raises(InvalidInput):
        theorem_rhs_hp(c, g, 0.5)


def test_hp_rhs_formula():
    c = _consts()
    alpha, N, delta = 0.01, 1000, 0.1
    radius, bound = hp_rhs(c, build_time_grid(Constant(alpha), N), alpha, N, delta)
    q = q_value(c, delta / (2 * alpha * N + 1))
    assert radius == pytest.approx(q * alpha**0.25)
    assert bound == pytest.approx(2 * radius + (q + c.Du) / (alpha * N))
    with pytest.raises(InvalidInput):
        hp_rhs(c, build_time_grid(Harmonic(1.0, 2.0), N), alpha, N, delta)


def test_missing_constants():
    with pytest.raises(MissingConstant):
        _consts(sigma_hat=None)
    ar1 = example41().with_noise(FilteredAR1(0.5, 1.0))
    with pytest.raises(MissingConstant):
        make_constants(ar1, example41_set())
    c = make_constants(ar1, example41_set(), assumption="A3")
    with pytest.raises(MissingConstant):
        _ = c.c3
    rep = c.report()
    assert "c1" in rep and "c3" not in rep and "sigma_hat" not in rep


def test_constants_validation():
    with pytest.raises(InvalidInput):
        _consts(D=0.0)
    with pytest.raises(InvalidInput):
        _consts(u=-1.0)
    with pytest.raises(InvalidInput):
        _consts(assumption="A4")


def test_loglog_slope():
    x = np.array([10.0, 100.0, 1000.0, 1e4])
    slope, se = loglog_slope(x, 3 * x**-0.5)
    assert slope == pytest.approx(-0.5, abs=1e-12)
    assert se < 1e-10
    assert math.isnan(loglog_slope(x[:2], x[:2])[1])
    with pytest.raises(InvalidInput):
        loglog_slope([1.0], [1.0])
