from __future__ import annotations

from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from quadgraph import univariate as up
from quadgraph.groebner import buchberger, is_groebner, is_unit_ideal, normal_form, spoly
from quadgraph.poly import Poly, Ring

F = Fraction


# -- sparse polynomials ----------------------------------------------------------------


def test_ring_arithmetic_and_printing():
    r = Ring(["x", "y"])
    x, y = r.gens()
    p = (x + y) ** 2 - x * x
    assert p == (x * y).scale(2) + y * y
    assert p.total_degree() == 2
    assert (p - p).is_zero()
    assert p.substitute({"x": 1}).evaluate([0, 2]) == 8


def test_polys_from_different_rings_do_not_mix():
    a = Ring(["x"]).var("x")
    b = Ring(["y"]).var("y")
    with pytest.raises(ValueError):
        buchberger([a, b])


small_coeffs = st.integers(-4, 4)


@st.composite
def small_polys(draw, ring: Ring, max_terms: int = 4, max_deg: int = 2):
    terms = {}
    for _ in range(draw(st.integers(1, max_terms))):
        mono = tuple(draw(st.integers(0, max_deg)) for _ in ring.names)
        terms[mono] = F(draw(small_coeffs))
    return Poly(ring, terms)


R3 = Ring(["x", "y", "z"])


def _to_sympy(p: Poly, syms):
    return sum(sp.Rational(c.numerator, c.denominator) * sp.prod([s**e for s, e in zip(syms, m)])
               for m, c in p.terms.items())


@settings(max_examples=30, deadline=None)
@given(st.lists(small_polys(R3), min_size=1, max_size=3))
def test_reduced_lex_basis_matches_sympy(gens):
    gens = [g for g in gens if g]
    if not gens:
        return
    syms = sp.symbols("x y z")
    ours = buchberger(gens, "lex")
    theirs = sp.groebner([_to_sympy(g, syms) for g in gens], *syms, order="lex")
    mine = {sp.expand(_to_sympy(g, syms)) for g in ours}
    ref = {sp.expand(sp.Poly(g, *syms).monic().as_expr()) for g in theirs.exprs}
    assert mine == ref


@settings(max_examples=30, deadline=None)
@given(st.lists(small_polys(R3), min_size=1, max_size=3))
def test_basis_is_idempotent_and_closed_under_spolys(gens):
    gens = [g for g in gens if g]
    if not gens:
        return
    basis = buchberger(gens, "lex")
    assert buchberger(basis, "lex") == basis
    if len(basis) <= 30:
        assert is_groebner(basis)
        for g in gens:
            assert not normal_form(g, basis)
        for i in range(len(basis)):
            for j in range(i + 1, len(basis)):
                assert not normal_form(spoly(basis[i], basis[j]), basis)


def test_orders_agree_on_the_ideal():
    x, y, z = R3.gens()
    gens = [x * x + y - 1, x * y - z, z * z - x]
    for order in ("grevlex", "elim"):
        other = buchberger(gens, order)
        lex = buchberger(gens, "lex")
        assert all(not normal_form(g, lex) for g in other)


def test_unit_ideal_detection():
    x, y, _ = R3.gens()
    assert is_unit_ideal([x * y - 1, x])
    assert not is_unit_ideal([x * y - 1])
    assert buchberger([x * y - 1, x]) == [R3.one()]


# -- univariate ------------------------------------------------------------------------


def P(*desc):
    """Ascending coefficient list from descending integers."""
    return [F(c) for c in reversed(desc)]


def test_square_free_decomposition_and_gcd():
    p = up.mul(up.mul(P(1, -1), P(1, -1)), P(9, -17))
    parts = up.squarefree_decomposition(p)
    assert (up.monic(P(9, -17)), 1) in [(up.monic(a), k) for a, k in parts]
    assert (up.monic(P(1, -1)), 2) in [(up.monic(a), k) for a, k in parts]
    assert up.monic(up.gcd(p, up.derivative(p))) == up.monic(P(1, -1))


def test_real_roots_of_the_bipartite_polynomial():
    roots = up.real_roots(P(9, -35, 43, -17))
    assert [r.exact for r in roots] == [F(1), F(17, 9)]
    assert [r.multiplicity for r in roots] == [2, 1]


def test_real_roots_examples():
    assert [str(r) for r in up.real_roots(P(3, -2))] == ["2/3"]
    assert up.real_roots(P(1, 0, 1)) == []
    r = up.real_roots(P(5, 0, -4))
    assert len(r) == 2
    assert r[1].value == pytest.approx(2 / 5**0.5, abs=1e-12)
    assert float(r[1].hi - r[1].lo) <= 1e-12
    assert up.primitive(list(r[1].factor)) == P(5, 0, -4)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=2, max_size=7))
def test_sturm_isolation_brackets_sign_changes(coeffs):
    p = up.trim([F(c) for c in coeffs])
    if up.degree(p) < 1:
        return
    roots = up.real_roots(p)
    expected = sorted({float(sp.re(t)) for t in sp.Poly(list(reversed(coeffs)), sp.Symbol("g")).real_roots()})
    assert len(roots) == len(expected)
    for r, e in zip(roots, expected):
        assert r.value == pytest.approx(e, abs=1e-9)
        if r.exact is None:
            f = list(r.factor)
            assert up.evaluate(f, r.lo) * up.evaluate(f, r.hi) < 0


def test_format_poly():
    assert up.format_poly(P(9, -35, 43, -17)) == "9g^3 - 35g^2 + 43g - 17"
    assert up.format_poly(P(1, -2, 1)) == "g^2 - 2g + 1"
    assert up.format_poly(P(3, -2)) == "3g - 2"
