from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadgraph import catalog
from quadgraph.graph import (
    Graph,
    GraphError,
    affine,
    codifferential,
    coloring_field,
    corollary_pairing,
    d,
    degree_weighted_weak_form,
    field_gammas,
    form_product,
    function_product,
    gamma_from_star,
    laplacian,
    laplacian_field,
    local_invariants,
    map_dilation,
    normalize,
    pullback_gamma,
    star_differences,
    verify_state,
    weak_residual,
)
from strategies import connected_graphs, graphs_with_fields, random_field

HEXAGON = dict(zip("012345", [0, 4, 2, 3, 1, 2]))


def test_graph_rejects_self_loops_and_duplicates():
    with pytest.raises(GraphError):
        Graph.from_edges([("a", "a")])
    with pytest.raises(GraphError):
        Graph.from_edges([("a", "b"), ("b", "a")])


def test_vertex_order_is_insertion_order():
    g = Graph.from_edges([("c", "a"), ("a", "b")])
    assert g.vertices == ("c", "a", "b")
    assert g.neighbours("a") == ("c", "b")


def test_star_quantities_on_a_path():
    g = Graph.from_edges([("a", "b")])
    phi = {"a": 0, "b": 1}
    assert star_differences(g, phi, "a") == [1]
    lap, dsq, gamma = local_invariants(g, phi, "a")
    assert lap == 1 and dsq == 1 and gamma == 1


def test_gamma_from_star_none_when_laplacian_vanishes():
    assert gamma_from_star([1, -1]) is None
    assert gamma_from_star([1, 1j]) == 0.0
    assert gamma_from_star([1, 2j]) is None
    assert gamma_from_star([1, 2]) == pytest.approx(2 * 5 / 9)


def test_real_hexagon_is_a_state_with_gamma_ten_ninths():
    g = catalog.cycle(6)
    assert verify_state(g, HEXAGON, 10 / 9).passed
    assert all(x == pytest.approx(10 / 9) for x in field_gammas(g, HEXAGON).values())
    bad = dict(HEXAGON, **{"1": 5})
    rep = verify_state(g, bad, 10 / 9)
    assert not rep.passed
    assert set(rep.failing()) == {"0", "1", "2"}


def test_normalize_matches_the_hexagon_up_to_relabelling():
    g = catalog.cycle(6)
    phi = dict(zip("012345", [0, 1, -1, 0, -2, 2]))
    psi = normalize(phi, "4", "5")  # the minimum sits at vertex 4
    rotated = [4 * psi[str((4 + k) % 6)] for k in range(6)]
    assert rotated == pytest.approx([0, 4, 2, 3, 1, 2])
    assert verify_state(g, psi, 10 / 9).passed


def test_normalize_errors_and_identity():
    with pytest.raises(ValueError):
        normalize({"a": 1, "b": 1}, "a", "b")
    phi = {"a": 0, "b": 1, "c": 3 + 2j}
    assert normalize(phi, "a", "b") == {k: complex(v) for k, v in phi.items()}


def test_two_colouring_of_complete_bipartite_gives_gamma_one():
    g = catalog.complete_bipartite(3, 3)
    colour = {v: 0 if v.startswith("x") else 1 for v in g.vertices}
    res = coloring_field(g, colour, [0, 1])
    assert set(res.gamma.values()) == {1.0}
    assert verify_state(g, res.field, res.gamma).passed


def test_segment_colouring_of_a_cycle_gives_gamma_two():
    g = catalog.cycle(6)
    colour = dict(zip("012345", [0, 0, 0, 1, 1, 1]))
    res = coloring_field(g, colour, [0, 1])
    for v in ("0", "2", "3", "5"):
        assert res.gamma[v] == 2.0
    assert res.free == {"1", "4"}
    assert verify_state(g, res.field, res.gamma).passed


def test_three_colouring_with_simplex_palette():
    g = catalog.cycle(3)
    palette = [cmath.exp(2j * math.pi * k / 3) for k in range(3)]
    res = coloring_field(g, dict(zip("012", range(3))), palette)
    assert all(x == pytest.approx(2 / 3) for x in res.gamma.values())


def test_single_colour_is_trivial():
    g = catalog.cycle(4)
    res = coloring_field(g, {v: 0 for v in g.vertices}, [5])
    assert res.trivial


def test_colouring_violating_hypotheses_is_rejected():
    g = catalog.path(3)
    with pytest.raises(ValueError):
        coloring_field(g, {"0": 0, "1": 1, "2": 1}, [0, 1, 2j])


def test_calculus_on_a_single_edge():
    g = Graph.from_edges([("a", "b")])
    phi = {"a": 0, "b": 1}
    dphi = d(g, phi)
    assert dphi[("a", "b")] == 1
    assert codifferential(g, dphi)["a"] == -1 == -laplacian(g, phi, "a")


def test_constant_field_has_zero_derivative():
    g = catalog.complete(4)
    phi = {v: 3 - 1j for v in g.vertices}
    assert all(v == 0 for v in d(g, phi).values())
    assert all(v == 0 for v in codifferential(g, d(g, phi)).values())


@settings(max_examples=50, deadline=None)
@given(graphs_with_fields())
def test_codifferential_of_derivative_is_minus_laplacian(gf):
    g, phi = gf
    lap = laplacian_field(g, phi)
    dd = codifferential(g, d(g, phi))
    for x in lap:
        assert abs(dd[x] + lap[x]) <= 1e-15 * max(1.0, abs(lap[x]) * 8)


@settings(max_examples=50, deadline=None)
@given(connected_graphs(max_vertices=20), st.integers(0, 2**32 - 1))
def test_adjointness_and_self_adjoint_laplacian(g, seed):
    rng = np.random.default_rng(seed)
    phi, psi = random_field(g, rng), random_field(g, rng)
    omega = {}
    for a, b in g.edge_list():
        w = complex(*rng.normal(size=2))
        omega[(a, b)], omega[(b, a)] = w, -w
    lhs = form_product(g, d(g, phi), omega)
    rhs = function_product(g, phi, codifferential(g, omega))
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))
    lp, ls = laplacian_field(g, phi), laplacian_field(g, psi)
    a = function_product(g, lp, psi)
    b = function_product(g, phi, ls)
    assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


def test_product_rule_with_midpoint_weights():
    g = catalog.complete(4)
    rng = np.random.default_rng(1)
    phi, psi = random_field(g, rng), random_field(g, rng)
    prod = {v: phi[v] * psi[v] for v in g.vertices}
    dprod, dphi, dpsi = d(g, prod), d(g, phi), d(g, psi)
    for a, b in g.edge_list():
        mid_phi = (phi[a] + phi[b]) / 2
        mid_psi = (psi[a] + psi[b]) / 2
        assert dprod[(a, b)] == pytest.approx(mid_phi * dpsi[(a, b)] + mid_psi * dphi[(a, b)])


@settings(max_examples=100, deadline=None)
@given(graphs_with_fields(), st.builds(complex, st.floats(0.1, 3), st.floats(-3, 3)),
       st.builds(complex, st.floats(-5, 5), st.floats(-5, 5)))
def test_state_property_is_affine_invariant(gf, lam, mu):
    g, phi = gf
    gammas = field_gammas(g, phi)
    gamma = {v: 0.0 if x is None else x for v, x in gammas.items()}
    before = verify_state(g, phi, gamma).passed
    after = verify_state(g, affine(phi, lam, mu), gamma).passed
    assert before == after


def _indicator(g, x):
    return {v: 1.0 if v == x else 0.0 for v in g.vertices}


def test_weak_form_vanishes_on_the_hexagon_state():
    g = catalog.cycle(6)
    for x in g.vertices:
        assert abs(weak_residual(g, HEXAGON, 10 / 9, _indicator(g, x))) < 1e-12
    ones = {v: 1.0 for v in g.vertices}
    assert abs(weak_residual(g, HEXAGON, 10 / 9, ones)) < 1e-12


def test_weak_form_at_a_failing_vertex_is_degree_times_residual():
    g = catalog.cycle(6)
    bad = dict(HEXAGON, **{"1": 5})
    rep = verify_state(g, bad, 10 / 9)
    for x in g.vertices:
        w = weak_residual(g, bad, 10 / 9, _indicator(g, x))
        assert w == pytest.approx(g.degree(x) * rep.residuals[x], abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(graphs_with_fields(max_vertices=12), st.booleans())
def test_weak_form_equivalent_to_pointwise(gf, make_state):
    g, phi = gf
    gammas = field_gammas(g, phi)
    gamma = {v: 0.0 if x is None else x for v, x in gammas.items()}
    scale = max(1.0, verify_state(g, phi, gamma).scale)
    if not make_state:
        lap = laplacian_field(g, phi)
        gamma = {v: x + 0.5 if abs(lap[v]) ** 2 > 1e-6 * scale else x for v, x in gamma.items()}
    rep = verify_state(g, phi, gamma, tol=1e-9)
    for x in g.vertices:
        weak = weak_residual(g, phi, gamma, _indicator(g, x))
        assert (abs(weak) <= 1e-9 * scale * g.degree(x)) == (abs(rep.residuals[x]) <= 1e-9 * scale)
    all_weak = all(abs(weak_residual(g, phi, gamma, _indicator(g, x))) <= 1e-9 * scale * g.degree(x)
                   for x in g.vertices)
    assert all_weak == rep.passed


def test_corollary_pairing_matches_the_degree_weighted_form():
    g = catalog.lift_example()
    rng = np.random.default_rng(5)
    phi = random_field(g, rng)
    ones = {v: 1.0 for v in g.vertices}
    assert corollary_pairing(g, phi, 0.7) == pytest.approx(degree_weighted_weak_form(g, phi, 0.7, ones))


def test_identity_map_has_dilation_one():
    g = catalog.cube()
    assert set(map_dilation({v: v for v in g.vertices}, g, g).values()) == {1}


def test_hexagon_double_covers_the_triangle():
    c6, c3 = catalog.cycle(6), catalog.cycle(3)
    f = {str(i): str(i % 3) for i in range(6)}
    assert set(map_dilation(f, c6, c3).values()) == {1}
    pulled = pullback_gamma(f, c6, c3, 2 / 3)
    assert all(x == pytest.approx(2 / 3) for x in pulled.values())
    tri = {str(k): cmath.exp(2j * math.pi * k / 3) for k in range(3)}
    assert verify_state(c6, {x: tri[f[x]] for x in c6.vertices}, pulled).passed


def test_collapsing_one_edge_of_a_path_is_not_holomorphic():
    p4, p3 = catalog.path(4), catalog.path(3)
    f = {"0": "0", "1": "1", "2": "1", "3": "2"}
    assert map_dilation(f, p4, p3) is None


def test_map_must_send_edges_to_edges_or_points():
    p3 = catalog.path(3)
    with pytest.raises(ValueError):
        map_dilation({"0": "0", "1": "2", "2": "1"}, p3, p3)
