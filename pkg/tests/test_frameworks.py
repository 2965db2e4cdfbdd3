from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadgraph import frameworks as fw
from quadgraph.graph import verify_state

SQ3 = math.sqrt(3)


def _is_configuration(conf, tol=1e-9):
    pts = conf.points
    return (np.abs(pts @ pts.T - conf.rho * np.eye(conf.dim)).max() <= tol
            and np.abs(pts.sum(axis=1)).max() <= tol)


@pytest.mark.parametrize("kind,params", [
    ("roots_of_unity", {"n": 3}), ("roots_of_unity", {"n": 7}), ("tetrahedron", {}),
    ("cross_polytope", {"dim": 3}), ("cross_polytope", {"dim": 5}), ("icosahedron", {}),
    ("icosahedron", {"lam": 2.5}), ("dodecahedron", {}), ("simplex", {"dim": 4}),
    ("hypercube", {"dim": 4}), ("quad", {"lam": 1.0, "mu": 1.0}),
    ("quad", {"lam": 0.6, "mu": math.sqrt(2 - 0.36)}),
])
def test_generated_configurations_satisfy_the_invariants(kind, params):
    conf = fw.make_configuration(kind, **params)
    assert _is_configuration(conf)


def test_configuration_examples():
    assert fw.roots_of_unity(3).rho == pytest.approx(1.5)
    # the points (+-1, +-1) have U U^t = 4 I
    assert fw.make_configuration("quad", lam=1.0, mu=1.0).rho == pytest.approx(4.0)
    with pytest.raises(ValueError):
        fw.make_configuration("quad", lam=1.0, mu=2.0)
    with pytest.raises(ValueError):
        fw.make_configuration("nonsense")


def test_simplex_induction_ratio():
    for dim in range(2, 7):
        pts = fw.simplex_points(dim)
        conf = fw.as_configuration(pts)
        r2 = float(np.sum(pts[:, 0] ** 2))
        assert conf.rho / r2 == pytest.approx((dim + 1) / dim)


def test_extensions_give_configurations():
    base = fw.roots_of_unity(5)
    assert _is_configuration(fw.cone_extension(base))
    assert _is_configuration(fw.bicone_extension(base))


def test_star_invariants_examples():
    w = fw.standard_star(fw.roots_of_unity(4), 1.0)
    inv = fw.star_invariants(w)
    assert inv.rho == pytest.approx(2) and inv.sigma == pytest.approx(2)
    octa = fw.cross_polytope(3).points
    x0 = octa[:, 0]
    nbrs = [octa[:, j] - x0 for j in range(6) if not np.allclose(octa[:, j], -x0) and j != 0]
    inv = fw.star_invariants(np.array(nbrs).T)
    assert inv.rho == pytest.approx(2) and inv.sigma == pytest.approx(2)
    assert inv.gamma == pytest.approx(0.5)
    with pytest.raises(fw.NotConfiguredError):
        fw.star_invariants(np.random.default_rng(0).normal(size=(3, 5)))


def test_projection_requires_orthogonal_matrix():
    with pytest.raises(ValueError):
        fw.project_with_transform(np.eye(3), np.ones((3, 3)))


def test_tetrahedron_projection_gamma():
    pts = fw.tetrahedron_points()
    star = np.array([pts[:, j] - pts[:, 0] for j in range(1, 4)]).T
    inv = fw.star_invariants(star)
    zs = fw.project_with_transform(star)
    assert fw.gamma_of_projection(zs) == pytest.approx(inv.gamma) == pytest.approx(0.75)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(["roots_of_unity", "tetrahedron", "cross_polytope", "icosahedron", "dodecahedron"]),
       st.floats(0.3, 3.0), st.integers(0, 2**32 - 1))
def test_projection_gamma_depends_only_on_invariants(kind, c, seed):
    conf = fw.make_configuration(kind, n=5) if kind == "roots_of_unity" else fw.make_configuration(kind)
    w = fw.standard_star(conf, c)
    inv = fw.star_invariants(w)
    a = fw.random_orthogonal(w.shape[0], np.random.default_rng(seed))
    g = fw.gamma_of_projection(fw.project_with_transform(w, a))
    if g is not None:
        assert g == pytest.approx(inv.gamma, abs=1e-9)


def test_random_orthogonal_is_orthogonal_and_reproducible():
    a = fw.random_orthogonal(5, np.random.default_rng(3))
    b = fw.random_orthogonal(5, np.random.default_rng(3))
    assert np.array_equal(a, b)
    assert np.abs(a.T @ a - np.eye(5)).max() < 1e-12


@pytest.mark.parametrize("symbol,gamma", [([3, 3], 0.75), ([3, 4], 0.5)])
def test_platonic_skeletons_are_invariant(symbol, gamma):
    rep = fw.invariance_probe(fw.schlafli(symbol), trials=200, seed=1)
    assert rep.passed(1e-9)
    assert all(g == pytest.approx(gamma) for g in rep.reference.values())


def test_cube_gamma_is_constant():
    rep = fw.invariance_probe(fw.schlafli([4, 3]), trials=200, seed=2)
    assert rep.passed(1e-9)
    values = set(round(g, 12) for g in rep.reference.values())
    assert len(values) == 1


def test_polygon_double_cones():
    sq = fw.double_cone(fw.polygon(4))
    assert sq.gamma_lat == pytest.approx(0.5) and sq.gamma_apex == pytest.approx(0.5)
    tri = fw.double_cone(fw.polygon(3))
    assert tri.gamma_lat == pytest.approx(0.8) and tri.gamma_apex == pytest.approx(1 / 3)
    for n in range(3, 9):
        dc = fw.double_cone(fw.polygon(n))
        assert dc.gamma_lat == pytest.approx(fw.polygon_gamma_lat(n))
        assert dc.gamma_apex == pytest.approx(fw.polygon_gamma_apex(n))
        rep = fw.invariance_probe(dc.framework, trials=100, seed=n)
        assert rep.passed(1e-9)
        for v, g in rep.reference.items():
            assert g == pytest.approx(dc.framework.expected[v], abs=1e-9)


def test_wrong_height_breaks_invariance():
    dc = fw.double_cone(fw.polygon(5))
    bad = fw.double_cone(fw.polygon(5), height=dc.height * 1.1)
    assert fw.invariance_probe(bad.framework, trials=100, seed=0).max_deviation >= 1e-3


def test_complete_double_cones():
    for n in range(3, 8):
        dc = fw.complete_double_cone(fw.roots_of_unity(n))
        assert dc.gamma_apex == pytest.approx((n - 2) / n)
        assert dc.gamma_lat == pytest.approx((n + 1) / (n + 2))
        assert fw.invariance_probe(dc.framework, trials=50, seed=n).passed(1e-9)
    segment = fw.complete_double_cone(fw.as_configuration(np.array([[1.0, -1.0]])))
    assert segment.gamma_apex == 0
    assert segment.framework.notes
    k5 = fw.complete_double_cone(fw.roots_of_unity(3), close_apexes=True)
    assert all(k5.framework.graph.degree(v) == 4 for v in k5.framework.graph.vertices)
    rep = fw.invariance_probe(k5.framework, trials=100, seed=4)
    assert rep.passed(1e-9)
    assert all(g == pytest.approx(0.8) for g in rep.reference.values())


def test_framework_field_is_a_state():
    dc = fw.double_cone(fw.polygon(6))
    phi = dc.framework.field(fw.random_orthogonal(3, np.random.default_rng(9)))
    assert verify_state(dc.framework.graph, phi, dict(dc.framework.expected)).passed


def test_extend_star_examples():
    for n in range(3, 8):
        b = math.sqrt(n) / 2
        assert fw.extend_star(n, b, (n - 2) / n, math.sqrt(n)) == pytest.approx((n + 1) / (n + 2))
        assert fw.extend_star(n, 0.7, 0.4, 0.0) == pytest.approx((n + 1) * 0.4 / n)
        with pytest.raises(ZeroDivisionError):
            fw.extend_star(n, 0.7, 0.4, -n * 0.7)


def test_stack_cones_offset_triangle_and_square():
    assert fw.stack_cones_offset(3) == pytest.approx([SQ3, -SQ3 / 4], abs=1e-12)
    assert fw.stack_cones_offset(4) == []


def test_stack_cones_offset_hexagon_solves_the_reference_quadratic():
    roots = fw.stack_cones_offset(6)
    for x in roots:
        assert 118 * x * x - 48 * SQ3 * x - 27 == pytest.approx(0, abs=1e-9)


def test_bisected_layers_triangle_case():
    res = fw.bisected_cone_layers("triangle-dodecagon")
    assert res.gamma_lat == pytest.approx(40 / (5 - SQ3) ** 2)
    assert len(res.roots) == 2
    for x in res.roots:
        assert 4 * (9 - 5 * SQ3) * x * x + 60 * SQ3 * x - 93 - 15 * SQ3 == pytest.approx(0, abs=1e-9)
    with pytest.raises(ValueError):
        fw.bisected_cone_layers("pentagon")


def test_schlafli_generators():
    assert len(fw.schlafli([5]).graph.vertices) == 5
    assert len(fw.schlafli([3, 5]).graph.edges) == 30
    assert len(fw.schlafli([5, 3]).graph.edges) == 30
    assert len(fw.schlafli([4, 3, 3]).graph.vertices) == 16
    assert len(fw.schlafli([3, 3, 4]).graph.vertices) == 8
    assert len(fw.schlafli([3, 3, 3]).graph.vertices) == 5
