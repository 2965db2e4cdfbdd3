from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadgraph import catalog
from quadgraph import frameworks as fw
from quadgraph.graph import Graph, affine, verify_state
from quadgraph.io import parse_graph
from quadgraph.lifting import (
    LiftError,
    collapse,
    default_orientation,
    edge_lengths,
    embedding_bound,
    is_collapsed,
    lift3,
    lift_at,
    lift_params,
    lift_residual,
    liftN,
    median_edge_length,
    path_distance,
    vertex_lengths,
)

DATA = Path(__file__).resolve().parents[1] / "data"
SQ3 = math.sqrt(3)
OUTER = [-1, -1 + 1j, -1 - 1j]
CENTRE = [1, 1j, -1, -1j]


def _lift_example():
    g = catalog.lift_example()
    phi = {"c": 0, "p": 1, "q": 1j, "r": -1, "s": -1j}
    return g, phi


def _constraint(zs):
    z = np.asarray(zs, dtype=complex)
    return np.vstack([z.real, z.imag, np.ones(len(z))])


def test_lift_params_of_the_outer_star():
    p = lift_params(OUTER, 1 / 3)
    assert p.rho == pytest.approx(2) and p.sigma == pytest.approx(1)
    assert (p.u1, p.u2) == pytest.approx((-1, 0))
    assert p.degenerate


def test_lift_params_of_the_central_star():
    p = lift_params(CENTRE, 1 / 3)
    assert p.rho == pytest.approx(2) and p.sigma == pytest.approx(1)
    assert (p.u1, p.u2) == pytest.approx((0, 0))
    assert not p.degenerate


def test_lift_params_errors():
    with pytest.raises(LiftError):
        lift_params(CENTRE, 1.0)
    with pytest.raises(LiftError):
        lift_params([1], 0.0)
    with pytest.raises(LiftError):
        lift_params(OUTER, 0.5)  # not a star for this gamma


def test_outer_third_row():
    w = lift3(OUTER, 1 / 3)
    expected = np.array([2 / SQ3, -1 / SQ3, -1 / SQ3])
    assert np.allclose(w[2], expected) or np.allclose(w[2], -expected)
    assert lift_residual(w, 2, 1) <= 1e-9


def test_central_third_row():
    w = lift3(CENTRE, 1 / 3)
    assert np.allclose(np.abs(w[2]), SQ3 / 2)
    assert len(set(np.sign(w[2]))) == 1
    assert lift_residual(w, 2, 1) <= 1e-9


def test_fourth_row_of_the_central_star():
    w = liftN(CENTRE, 1 / 3, 4)
    expected = np.array([1, -1, 1, -1]) / math.sqrt(2)
    assert np.allclose(w[3], expected) or np.allclose(w[3], -expected)
    assert lift_residual(w, 2, 1) <= 1e-9
    assert np.allclose(liftN(CENTRE, 1 / 3, 3), lift3(CENTRE, 1 / 3))
    with pytest.raises(LiftError):
        liftN(CENTRE, 1 / 3, 5)


def test_third_row_has_minimum_norm():
    w = lift3(CENTRE, 1 / 3)
    _, s, vt = np.linalg.svd(_constraint(CENTRE))
    null = vt[int(np.sum(s > 1e-10)):]
    rng = np.random.default_rng(0)
    norm = np.linalg.norm(w[2])
    for _ in range(100):
        y = rng.normal(size=null.shape[0]) @ null
        assert norm <= np.linalg.norm(w[2] + y) + 1e-12


def test_lift_determinant_identity():
    for zs, n in ((CENTRE, 4), (OUTER, 3)):
        for N in range(3, n + 1):
            w = liftN(zs, 1 / 3, N)
            p = lift_params(zs, 1 / 3)
            assert np.linalg.det(w @ w.T) == pytest.approx(p.rho ** (N - 1) * (p.rho + p.sigma))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["tetrahedron", "cross_polytope", "icosahedron", "dodecahedron"]),
       st.floats(0.3, 3.0), st.integers(0, 2**32 - 1))
def test_projected_stars_lift_back(kind, c, seed):
    w = fw.standard_star(fw.make_configuration(kind), c)
    inv = fw.star_invariants(w)
    zs = fw.project_with_transform(w, fw.random_orthogonal(w.shape[0], np.random.default_rng(seed)))
    if fw.gamma_of_projection(zs) is None or inv.gamma >= 1:
        return
    try:
        lifted = lift3(zs, inv.gamma)
    except LiftError:
        return  # projection too close to a degenerate direction for the default tolerance
    assert lift_residual(lifted, inv.rho, inv.sigma) <= 1e-7 * max(1.0, inv.rho + inv.sigma)


def test_regular_lift_of_a_degenerate_star_has_equal_edges():
    w = lift3(OUTER, 1 / 3, regular=True)
    lengths = np.sum(w**2, axis=0)
    assert np.allclose(lengths, lengths[0])


def test_lift_at_uses_colour_order_and_sign():
    g, phi = _lift_example()
    orient = default_orientation(g)
    nbrs, w = lift_at(g, phi, "c", 1 / 3, orientation=orient)
    assert nbrs == orient.sorted_neighbours(g, "c")
    assert lift_residual(w, 2, 1) <= 1e-9
    minor = np.linalg.det(w[:, :3])
    assert minor > 0


def test_median_lengths_of_the_lift_example():
    assert median_edge_length(CENTRE, 1 / 3) == pytest.approx(math.sqrt(7) / 2, abs=1e-12)
    assert median_edge_length(OUTER, 1 / 3) == pytest.approx(math.sqrt(7 / 3), abs=1e-12)
    doc = parse_graph((DATA / "lift.graph").read_text())
    g, phi = doc.graph, doc.phi
    r = vertex_lengths(g, phi, 1 / 3)
    assert r["c"] == pytest.approx(math.sqrt(7) / 2, abs=1e-12)
    assert all(r[v] == pytest.approx(math.sqrt(7 / 3), abs=1e-12) for v in "pqrs")


def test_median_length_matches_the_lifted_edges():
    for zs in (CENTRE, OUTER):
        w = lift3(zs, 1 / 3)
        mean_sq = float(np.mean(np.sum(w**2, axis=0)))
        assert median_edge_length(zs, 1 / 3) == pytest.approx(math.sqrt(mean_sq))


@settings(max_examples=100, deadline=None)
@given(st.builds(complex, st.floats(0.1, 5), st.floats(-5, 5)),
       st.builds(complex, st.floats(-5, 5), st.floats(-5, 5)))
def test_absolute_lengths_are_normalization_invariant(lam, mu):
    g, phi = _lift_example()
    ref = edge_lengths(g, phi, 1 / 3, absolute=True)
    got = edge_lengths(g, affine(phi, lam, mu), 1 / 3, absolute=True)
    for e, v in ref.items():
        assert got[e] == pytest.approx(v, rel=1e-9)


def test_local_triangle_inequality():
    g, phi = _lift_example()
    ell = edge_lengths(g, phi, 1 / 3)
    length = {frozenset(e): v for e, v in ell.items()}
    for a, b in g.edge_list():
        for c in set(g.neighbours(a)) & set(g.neighbours(b)):
            x, y, z = length[frozenset((a, b))], length[frozenset((b, c))], length[frozenset((a, c))]
            assert x <= y + z and y <= x + z and z <= x + y


def test_path_distance_goes_through_the_centre():
    g, phi = _lift_example()
    ell = {frozenset(e): v for e, v in edge_lengths(g, phi, 1 / 3).items()}
    direct = ell[frozenset("pc")] + ell[frozenset("cr")]
    around = ell[frozenset("pq")] + ell[frozenset("qr")]
    assert direct < around
    assert path_distance(g, phi, "p", "r", gamma=1 / 3) == pytest.approx(direct)
    assert path_distance(g, phi, "p", "r", gamma=1 / 3) == pytest.approx(2.85040088718, abs=1e-10)


def test_path_distance_needs_a_collapsed_graph():
    g = catalog.cycle(6)
    phi = dict(zip("012345", [0, 0, 0, 1, 1, 1]))
    assert not is_collapsed(g, phi)
    with pytest.raises(ValueError):
        path_distance(g, phi, "0", "3")


def test_collapsing_the_segment_state_leaves_two_paths():
    g = catalog.cycle(6)
    phi = dict(zip("012345", [0, 0, 0, 1, 1, 1]))
    res = collapse(g, phi, {"0": 2, "1": 0, "2": 2, "3": 2, "4": 0, "5": 2})
    assert len(res.removed_edges) == 4
    assert sorted(len(c) for c in res.graph.components()) == [2, 2]
    assert res.gamma == {"0": 1, "2": 1, "3": 1, "5": 1}
    assert is_collapsed(res.graph, {v: phi[v] for v in res.graph.vertices})


def test_collapse_separates_two_triangles_joined_by_an_edge():
    g = Graph.from_edges([("a", "b"), ("b", "c"), ("c", "a"), ("c", "d"),
                          ("d", "e"), ("e", "f"), ("f", "d")])
    tri = [1, complex(-0.5, SQ3 / 2), complex(-0.5, -SQ3 / 2)]
    phi = dict(zip("abcdef", [tri[0], tri[1], tri[2], tri[2], tri[1], tri[0]]))
    res = collapse(g, phi)
    assert len(res.graph.components()) == 2
    sub = {v: phi[v] for v in res.graph.vertices}
    assert verify_state(res.graph, sub, res.gamma).passed


def test_embedding_bound_examples():
    g, phi = _lift_example()
    assert embedding_bound(g, phi, 1 / 3).min_degree == 3
    k5 = catalog.complete(5)
    conf = fw.roots_of_unity(5)
    field = {v: complex(*conf.points[:, i]) for i, v in enumerate(k5.vertices)}
    assert verify_state(k5, field, 0.8).passed
    assert embedding_bound(k5, field, 0.8).min_degree == 4
    with pytest.raises(ValueError):
        embedding_bound(catalog.cycle(6), dict(zip("012345", [0, 4, 2, 3, 1, 2])), 10 / 9)
