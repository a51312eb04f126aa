"""Cone functions, evaluation, lattice operations, tent decompositions."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plval import plfunction as pf
from plval import polytope as pt
from plval.errors import InvalidComplex
from plval.integration import lq_norm

import oracles


def fan_function(seed: int, pieces: int = 6) -> pf.PLFunction:
    from plval.verify import random_fan_function

    return random_fan_function(seed, pieces)


def test_cone_square_values(cone_square):
    assert pf.evaluate(cone_square, [0.0, 0.0]) == pytest.approx(1.0, abs=1e-12)
    assert pf.evaluate(cone_square, [1.0, 1.0]) == pytest.approx(0.0, abs=1e-12)
    assert pf.evaluate(cone_square, [0.5, 0.0]) == pytest.approx(0.5, abs=1e-12)
    assert pf.evaluate(cone_square, [5.0, 5.0]) == 0.0


def test_cone_gradients_are_scaled_normals(square, cone_square):
    # each central simplex sits under one facet; gradient must be -u_i/h_i
    expected = {tuple(np.round(-np.asarray(f.normal) / f.support, 9)) for f in square.facets}
    got = {tuple(np.round(g, 9)) for _, g in pf.gradient_field(cone_square)}
    assert got == expected


def test_cone_zero_outside(cone_square, rng):
    for _ in range(200):
        x = rng.uniform(-4, 4, size=2)
        if np.max(np.abs(x)) > 1.0 + 1e-9:
            assert pf.evaluate(cone_square, x) == 0.0


def test_evaluate_at_vertices(cone_square):
    cx = cone_square.complex
    for i, v in enumerate(cx.vertices):
        assert pf.evaluate(cone_square, v) == pytest.approx(cone_square.values[i], abs=1e-12)


def test_gradient_field_constant_zero(square):
    cx = pt.central_triangulation(square)
    zero = pf.PLFunction(complex=cx, values=np.zeros(len(cx.vertices)))
    for _, g in pf.gradient_field(zero):
        assert np.allclose(g, 0.0, atol=1e-14)


def test_gradient_field_affine_exact(square):
    # affine data is reproduced exactly on every simplex
    cx = pt.central_triangulation(square)
    a = np.array([0.7, -0.3])
    vals = cx.vertices @ a + 0.25
    f = pf.PLFunction(complex=cx, values=vals)
    for _, g in pf.gradient_field(f):
        assert np.allclose(g, a, atol=1e-12)


def test_scale_values(cone_square):
    same = pf.scale_values(cone_square, 1.0)
    assert np.allclose(same.values, cone_square.values)
    zero = pf.scale_values(cone_square, 0.0)
    assert np.allclose(zero.values, 0.0)


def test_scale_values_norm_homogeneity(cone_square):
    # oracle: adaptive quadrature of |s f|^q per triangle
    s, q = -1.7, 2.0
    scaled = pf.scale_values(cone_square, s)
    cx = cone_square.complex
    direct = oracles.quad_lq_power_2d(
        cx.vertices, [list(t) for t in cx.simplices], scaled.values, q)
    assert lq_norm(scaled, q) ** q == pytest.approx(direct, rel=1e-10)
    assert lq_norm(scaled, q) == pytest.approx(abs(s) * lq_norm(cone_square, q), rel=1e-10)


def test_compose_affine_identity(cone_square):
    g = pf.compose_affine(cone_square, np.eye(2), np.zeros(2))
    for x in np.random.default_rng(1).uniform(-1.5, 1.5, (100, 2)):
        assert pf.evaluate(g, x) == pytest.approx(pf.evaluate(cone_square, x), abs=1e-12)


def test_compose_affine_unimodular_preserves_norms(square, cone_square):
    phi = np.array([[1.0, 0.8], [0.0, 1.0]])
    g = pf.compose_affine(cone_square, phi, np.zeros(2))
    # same function as the cone over the sheared polytope
    ref = pf.cone_function(pt.apply_unimodular(square, phi))
    for x in np.random.default_rng(2).uniform(-2, 2, (100, 2)):
        assert pf.evaluate(g, x) == pytest.approx(pf.evaluate(ref, x), abs=1e-10)
    for q in (1.0, 2.0):
        assert lq_norm(g, q) == pytest.approx(lq_norm(cone_square, q), rel=1e-8)


def test_compose_affine_translation(cone_square):
    t = np.array([3.0, -2.0])
    g = pf.compose_affine(cone_square, np.eye(2), t)
    assert pf.evaluate(g, t) == pytest.approx(1.0, abs=1e-12)
    assert lq_norm(g, 1.0) == pytest.approx(lq_norm(cone_square, 1.0), rel=1e-10)


def test_join_of_cones_over_convex_union():
    # slabs whose union is the square; the join must be the square's cone
    P = pt.hull_from_points([[1, 1], [-1, 1], [1, -0.5], [-1, -0.5]])
    Q = pt.hull_from_points([[1, 0.5], [-1, 0.5], [1, -1], [-1, -1]])
    joined = pf.join(pf.cone_function(P), pf.cone_function(Q))
    ref = pf.cone_function(pt.cube(2))
    for x in np.random.default_rng(3).uniform(-1.3, 1.3, (300, 2)):
        assert pf.evaluate(joined, x) == pytest.approx(pf.evaluate(ref, x), abs=1e-9)


def test_join_idempotent(cone_square, rng):
    joined = pf.join(cone_square, cone_square)
    for x in rng.uniform(-1.5, 1.5, (200, 2)):
        assert pf.evaluate(joined, x) == pytest.approx(pf.evaluate(cone_square, x), abs=1e-10)


def test_join_meet_l1_additivity():
    f = fan_function(1)
    g = fan_function(2)
    lhs = lq_norm(pf.join(f, g), 1.0) + lq_norm(pf.meet(f, g), 1.0)
    rhs = lq_norm(f, 1.0) + lq_norm(g, 1.0)
    assert lhs == pytest.approx(rhs, rel=1e-8)


@given(seed=st.integers(0, 25))
@settings(max_examples=12, deadline=None)
def test_lattice_laws_sampled(seed):
    rng = np.random.default_rng(seed)
    from plval.verify import random_cone_function

    f = random_cone_function(rng, 2)
    g = random_cone_function(rng, 2)
    jo, me = pf.join(f, g), pf.meet(f, g)
    jo_swap = pf.join(g, f)
    absorb = pf.meet(f, jo)
    pts = rng.uniform(-2, 2, (80, 2))
    for x in pts:
        fv, gv = pf.evaluate(f, x), pf.evaluate(g, x)
        assert pf.evaluate(jo, x) == pytest.approx(max(fv, gv), abs=1e-9)
        assert pf.evaluate(me, x) == pytest.approx(min(fv, gv), abs=1e-9)
        assert pf.evaluate(jo_swap, x) == pytest.approx(max(fv, gv), abs=1e-9)
        assert pf.evaluate(absorb, x) == pytest.approx(fv, abs=1e-9)


def test_join_carries_winning_gradient():
    rng = np.random.default_rng(4)
    from plval.verify import random_cone_function

    f = random_cone_function(rng, 2)
    g = random_cone_function(rng, 2)
    jo = pf.join(f, g)
    grads = dict(pf.gradient_field(jo))
    fg = dict(pf.gradient_field(f))
    gg = dict(pf.gradient_field(g))

    def source_gradient(func, table, x):
        # gradient of the simplex of func containing x, if x is interior
        from plval.convex import barycentric_matrix

        cx = func.complex
        for si, s in enumerate(cx.simplices):
            M, v0 = barycentric_matrix(cx.vertices[list(s)])
            tail = M @ (x - v0)
            bary = np.append(1.0 - tail.sum(), tail)
            if np.all(bary > 1e-7):
                return table.get(si)
        return None

    checked = 0
    for si, s in enumerate(jo.complex.simplices):
        c = jo.complex.vertices[list(s)].mean(axis=0)
        fv, gv = pf.evaluate(f, c), pf.evaluate(g, c)
        if abs(fv - gv) < 1e-6:
            continue
        winner, table = (f, fg) if fv > gv else (g, gg)
        expected = source_gradient(winner, table, c)
        if expected is None:
            continue  # centroid sits where the winner is identically 0
        assert np.allclose(grads[si], expected, atol=1e-8)
        checked += 1
    assert checked > 0


def test_outputs_pass_complex_invariants():
    f = fan_function(5)
    g = fan_function(6)
    for out in (pf.join(f, g), pf.meet(f, g)):
        assert oracles.check_complex_invariants(out.complex) == []


def test_tent_decomposition_central_fan(square, cone_square):
    tents = pf.tent_decomposition(cone_square)
    assert len(tents) == len(square.facets)
    rng = np.random.default_rng(5)
    for x in rng.uniform(-1.4, 1.4, (500, 2)):
        best = max(pf.evaluate(t, x) for t in tents)
        assert best == pytest.approx(pf.evaluate(cone_square, x), abs=1e-9)


def test_tent_decomposition_single_simplex():
    cx = pf.SimplicialComplex(
        dim=2,
        vertices=np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
        simplices=((0, 1, 2),),
    )
    f = pf.PLFunction(complex=cx, values=np.array([1.0, 0.0, 0.0]))
    tents = pf.tent_decomposition(f)
    assert len(tents) == 1
    for x in np.random.default_rng(6).uniform(-0.2, 1.2, (100, 2)):
        assert pf.evaluate(tents[0], x) == pytest.approx(pf.evaluate(f, x), abs=1e-12)


def test_tent_decomposition_random_fan():
    f = fan_function(7)
    tents = pf.tent_decomposition(f)
    rng = np.random.default_rng(7)
    lo = f.complex.vertices.min(axis=0) - 0.1
    hi = f.complex.vertices.max(axis=0) + 0.1
    pts = rng.uniform(lo, hi, (10000, 2))
    worst = 0.0
    for x in pts:
        best = max(pf.evaluate(t, x) for t in tents)
        worst = max(worst, abs(best - pf.evaluate(f, x)))
    assert worst < 1e-9


def test_json_round_trip(cone_square):
    data = cone_square.to_json_dict()
    back = pf.from_json_dict(data)
    assert np.allclose(back.values, cone_square.values)
    assert np.allclose(back.complex.vertices, cone_square.complex.vertices)


def test_json_rejects_nonconforming():
    # two triangles overlapping in their interiors, not along a face
    data = {
        "dim": 2,
        "vertices": [[0, 0], [2, 0], [0, 2], [1, 0.2], [1.5, 1.5], [0.2, 1]],
        "simplices": [[0, 1, 2], [3, 4, 5]],
        "values": [0, 0, 0, 0, 0, 0],
    }
    with pytest.raises((InvalidComplex, ValueError)) as err:
        pf.from_json_dict(data)
    assert "simplex" in str(err.value) or "simplices" in str(err.value)


def test_boundary_values_vanish():
    f = fan_function(8)
    cx = f.complex
    # edges used once are boundary; their endpoints must carry value 0
    from collections import Counter

    edge_count = Counter()
    for s in cx.simplices:
        for a in s:
            for b in s:
                if a < b:
                    edge_count[(a, b)] += 1
    boundary_vertices = {v for e, c in edge_count.items() if c == 1 for v in e}
    for v in boundary_vertices:
        assert f.values[v] == pytest.approx(0.0, abs=1e-12)
