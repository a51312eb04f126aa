"""Exact simplex integrals, norms, level sets, densities, Fisher matrices."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plval import plfunction as pf
from plval import polytope as pt
from plval.errors import NegativeValues
from plval.integration import (
    PushforwardDensity,
    c_pn,
    fisher_matrix,
    grad_p_norm,
    integrate_function_of_values,
    integrate_power_over_simplex,
    level_set_volume,
    lq_norm,
    sobolev_conjugate,
    sobolev_norm,
)

import oracles


def zero_like(f: pf.PLFunction) -> pf.PLFunction:
    return pf.PLFunction(complex=f.complex, values=np.zeros(len(f.values)))


# -- integrate_power_over_simplex -------------------------------------------


def test_power_over_interval():
    assert integrate_power_over_simplex([0.0, 1.0], 1.0, 1) == pytest.approx(0.5, abs=1e-14)


@pytest.mark.parametrize("q", [1, 2, 3, 1.5, 2.75])
def test_power_over_cone_simplex(q):
    # values (1, 0, ..., 0) integrate to |simplex| * c_{q,n}
    for n, vol in ((2, 0.5), (3, 2.0)):
        vals = np.zeros(n + 1)
        vals[0] = 1.0
        expected = vol * oracles.beta_cpn(float(q), n)
        assert integrate_power_over_simplex(vals, vol, q) == pytest.approx(expected, rel=1e-10)


def test_power_matches_adaptive_quadrature():
    rng = np.random.default_rng(7)
    tri = rng.uniform(-1, 1, (3, 2))
    vals = rng.uniform(0, 2, 3)
    vol = oracles.det_simplex_volume(tri)
    ref = oracles.quad_power_triangle(tri, vals, 3.0)
    assert integrate_power_over_simplex(vals, vol, 3) == pytest.approx(ref, rel=1e-9)


def test_power_rejects_negative_values():
    with pytest.raises(NegativeValues):
        integrate_power_over_simplex([-0.5, 1.0, 0.0], 1.0, 2)


# -- pushforward density ------------------------------------------------------


@pytest.mark.parametrize("vals", [(0.0, 1.0, 0.5), (0.2, 0.9, 0.4, 0.7), (1.0, 1.0, 1.0)])
def test_density_nonnegative_unit_mass(vals):
    dens = PushforwardDensity(np.array(vals), len(vals) - 1)
    lo, hi = min(vals), max(vals)
    if dens.is_dirac:
        assert lo == hi
        return
    ts = np.linspace(lo, hi, 500)
    assert np.all(dens.pdf(ts) >= -1e-12)
    total = dens.integrate(lambda t: np.ones_like(t))
    assert total == pytest.approx(1.0, rel=1e-12)


def test_density_moment_matches_quadrature():
    vals = np.array([0.1, 0.8, 0.3])
    dens = PushforwardDensity(vals, 2)
    from scipy.integrate import quad

    ref, _ = quad(lambda t: t**1.7 * dens.pdf(np.array([t]))[0], 0.1, 0.8,
                  epsabs=1e-13, limit=200)
    assert dens.moment_abs(1.7) == pytest.approx(ref, rel=1e-9)


# -- norms ---------------------------------------------------------------------


def test_lq_norm_square_cone(cone_square):
    assert lq_norm(cone_square, 1.0) == pytest.approx(4.0 / 3.0, rel=1e-12)


def test_lq_norm_matches_monte_carlo(cone_square):
    # 1e6-sample Monte-Carlo of the same integral
    rng = np.random.default_rng(0)
    pts = rng.uniform(-1, 1, (10**6, 2))
    mc = 4.0 * np.mean(np.maximum(1.0 - np.max(np.abs(pts), axis=1), 0.0))
    assert lq_norm(cone_square, 1.0) == pytest.approx(mc, rel=5e-3)


def test_lq_norm_zero(cone_square):
    assert lq_norm(zero_like(cone_square), 2.0) == 0.0


@given(s=st.floats(-3, 3), q=st.sampled_from([1.0, 1.5, 2.0]))
@settings(max_examples=30, deadline=None)
def test_lq_norm_homogeneous(s, q):
    f = pf.cone_function(pt.cube(2))
    assert lq_norm(pf.scale_values(f, s), q) == pytest.approx(abs(s) * lq_norm(f, q), rel=1e-10, abs=1e-12)


def test_lq_norm_splits_sign_changes(square):
    # odd function: |f| integrates like the positive tent on each half
    cx = pt.central_triangulation(square)
    vals = np.where(cx.vertices[:, 0] > 0.5, 1.0, 0.0) - np.where(cx.vertices[:, 0] < -0.5, 1.0, 0.0)
    f = pf.PLFunction(complex=cx, values=vals)
    ref = oracles.quad_lq_power_2d(cx.vertices, [list(t) for t in cx.simplices], vals, 1.0)
    assert lq_norm(f, 1.0) == pytest.approx(ref, rel=1e-9)


def test_grad_p_norm_square(cone_square):
    assert grad_p_norm(cone_square, 1.0) == pytest.approx(4.0, rel=1e-12)
    assert grad_p_norm(cone_square, 2.0) == pytest.approx(2.0, rel=1e-12)
    assert grad_p_norm(zero_like(cone_square), 1.5) == 0.0


def test_sobolev_norm(cone_square):
    assert sobolev_norm(zero_like(cone_square), 1.0) == 0.0
    assert sobolev_norm(cone_square, 1.0) == pytest.approx(16.0 / 3.0, rel=1e-12)
    for s in (0.2, 0.7, 0.95):
        assert sobolev_norm(pf.scale_values(cone_square, s), 1.0) < sobolev_norm(cone_square, 1.0)


def test_sobolev_conjugate():
    assert sobolev_conjugate(1.0, 2) == pytest.approx(2.0)
    assert sobolev_conjugate(2.0, 3) == pytest.approx(6.0)
    with pytest.raises(ValueError):
        sobolev_conjugate(2.0, 2)


# -- level sets ----------------------------------------------------------------


def test_level_set_volume_square(cone_square):
    assert level_set_volume(cone_square, 0.5) == pytest.approx(1.0, rel=1e-12)
    assert level_set_volume(cone_square, 1.0) == pytest.approx(0.0, abs=1e-12)
    assert level_set_volume(cone_square, 2.0) == 0.0
    assert level_set_volume(cone_square, 1e-9) == pytest.approx(4.0, rel=1e-6)


@given(t=st.floats(0.01, 0.99))
@settings(max_examples=25, deadline=None)
def test_level_set_scaling_law(t):
    f = pf.cone_function(pt.cube(2))
    assert level_set_volume(f, t) == pytest.approx(4.0 * (1.0 - t) ** 2, rel=1e-10)


# -- kernel integration against the value density -------------------------------


def test_integrate_power_path(cone_square):
    # closed-form moment path, exact: c_{q,2} * |P|
    val = integrate_function_of_values(cone_square, lambda t: np.abs(t) ** 2, power=2.0)
    assert val == pytest.approx(oracles.beta_cpn(2.0, 2) * 4.0, rel=1e-12)


def test_integrate_zero_function_of_values(cone_square):
    assert integrate_function_of_values(cone_square, lambda t: np.zeros_like(t)) == 0.0


def test_integrate_hat_matches_layer_cake(cone_square):
    hat = lambda t: np.minimum(np.maximum(2 * t, 0.0), np.maximum(2 - 2 * t, 0.0))
    got = integrate_function_of_values(cone_square, hat, breakpoints=(0.5,))
    ref = oracles.layer_cake_cone(lambda t: min(2 * t, 2 - 2 * t), 2, 4.0)
    assert ref == pytest.approx(2.0, abs=1e-12)  # oracle value, derived once
    assert got == pytest.approx(ref, abs=1e-10)


# -- Fisher matrix ---------------------------------------------------------------


def test_fisher_square(cone_square):
    M = fisher_matrix(cone_square)
    assert np.allclose(M, np.diag([2.0, 2.0]), atol=1e-12)


def test_fisher_zero(cone_square):
    assert np.allclose(fisher_matrix(zero_like(cone_square)), 0.0)


def test_fisher_contravariance(cone_square):
    rng = np.random.default_rng(3)
    for _ in range(5):
        a, b = rng.uniform(-1.5, 1.5, 2)
        phi = np.array([[1.0, a], [0.0, 1.0]]) @ np.array([[1.0, 0.0], [b, 1.0]])
        lhs = fisher_matrix(pf.compose_affine(cone_square, phi, np.zeros(2)))
        inv = np.linalg.inv(phi)
        rhs = inv.T @ fisher_matrix(cone_square) @ inv
        assert np.allclose(lhs, rhs, atol=1e-9 * max(1.0, np.abs(rhs).max()))


# -- the combinatorial constant ---------------------------------------------------


def test_c_pn_values():
    assert c_pn(1.0, 2) == pytest.approx(1.0 / 3.0, rel=1e-14)
    assert c_pn(1.0, 1) == pytest.approx(0.5, rel=1e-14)
    from math import comb

    for p in (1, 2, 3):
        for n in (1, 2, 3, 4):
            assert c_pn(float(p), n) == pytest.approx(1.0 / comb(n + p, n), rel=1e-13)


@given(p=st.floats(1.0, 4.0), n=st.integers(1, 4))
@settings(max_examples=25, deadline=None)
def test_c_pn_matches_beta_oracle(p, n):
    assert c_pn(p, n) == pytest.approx(oracles.beta_cpn(p, n), rel=1e-9)
