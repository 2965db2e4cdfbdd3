"""The gamma-polynomial of a graph and exact spectrum membership."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx

from quadgraph import univariate as up
from quadgraph.graph import Graph
from quadgraph.groebner import buchberger, is_unit_ideal
from quadgraph.poly import Poly, Ring

GAMMA = "g"


def _ring_for(graph: Graph, ell: int) -> tuple[Ring, dict[int, str]]:
    names = {}
    for j, v in enumerate(graph.vertices):
        if j not in (0, ell):
            names[j] = f"z{j + 1}"
    return Ring(list(names.values()) + [GAMMA]), names


def equation_system(graph: Graph, ell: int) -> list[Poly]:
    """Cleared equations gamma*(sum z)^2 - n*sum z^2 at every vertex.

    Vertices are numbered 1..N in insertion order; ``ell`` is 1-based as well and
    selects the anchoring z_1 = 0, z_ell = 1.  The variables are z_j for the other
    vertices followed by gamma, which is the smallest in lex order.
    """
    nverts = len(graph.vertices)
    if not 2 <= ell <= nverts:
        raise ValueError(f"ell must lie in 2..{nverts}")
    idx = ell - 1
    ring, names = _ring_for(graph, idx)
    g = ring.var(GAMMA)
    index = {v: j for j, v in enumerate(graph.vertices)}

    def z(j: int) -> Poly:
        if j == 0:
            return ring.zero()
        if j == idx:
            return ring.one()
        return ring.var(names[j])

    out = []
    for j, v in enumerate(graph.vertices):
        ns = graph.neighbours(v)
        if not ns:
            continue
        diffs = [z(j) - z(index[y]) for y in ns]
        total = ring.zero()
        squares = ring.zero()
        for dd in diffs:
            total = total + dd
            squares = squares + dd * dd
        f = g * total * total - squares.scale(len(ns))
        if f:
            out.append(f)
    return out


def _gamma_only(basis: Sequence[Poly]) -> list[Fraction] | None:
    if len(basis) == 1 and basis[0].is_constant():
        return [Fraction(1)]
    gi = basis[0].ring.nvars - 1
    for b in basis:
        if b.is_univariate_in(gi):
            return up.primitive(b.univariate_coeffs(gi))
    return None


@dataclass(frozen=True)
class GammaPolynomial:
    coeffs: tuple[Fraction, ...]
    factors: dict[int, tuple[Fraction, ...]]

    @property
    def trivial(self) -> bool:
        return len(self.coeffs) == 1

    def integer_coeffs(self) -> list[int]:
        """Coefficients in descending powers."""
        return [int(c) for c in reversed(self.coeffs)]

    def __str__(self) -> str:
        return up.format_poly(list(self.coeffs))


class SpectrumError(RuntimeError):
    pass


def anchor_polynomial(graph: Graph, ell: int, order: str = "elim",
                      progress: Callable[[int, int], None] | None = None) -> list[Fraction]:
    """p_ell: the gamma-only element of the reduced basis (``[1]`` if no solutions).

    Any order that eliminates the z-variables before gamma yields the same
    element; the block order ``elim`` is the default and much faster than ``lex``.
    """
    basis = buchberger(equation_system(graph, ell), order, progress)
    p = _gamma_only(basis)
    if p is None:
        raise SpectrumError(f"ideal for ell={ell} has no element in gamma alone")
    return p


def anchor_classes(graph: Graph, max_automorphisms: int = 20000) -> dict[int, int]:
    """Map each ell in 2..N to a representative ell with the same anchor polynomial.

    An automorphism carrying the vertex pair {1, ell} onto {1, ell'} turns one
    anchored system into the other (after z -> 1 - z when the pair is swapped), so
    p_ell = p_ell'.  Automorphisms are enumerated up to ``max_automorphisms``;
    stopping early only means fewer classes are merged.
    """
    verts = list(graph.vertices)
    index = {v: j + 1 for j, v in enumerate(verts)}
    parent = {ell: ell for ell in range(2, len(verts) + 1)}

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    g = nx.Graph()
    g.add_nodes_from(verts)
    g.add_edges_from(graph.edge_list())
    first = verts[0]
    matcher = nx.algorithms.isomorphism.GraphMatcher(g, g)
    for count, auto in enumerate(matcher.isomorphisms_iter()):
        if count >= max_automorphisms:
            break
        image = index[auto[first]]
        for v in verts[1:]:
            ell, target = index[v], index[auto[v]]
            if image == 1:
                union(ell, target)
            elif target == 1:
                union(ell, image)
    return {ell: find(ell) for ell in parent}


def gamma_polynomial(graph: Graph, order: str = "elim",
                     progress: Callable[[int, int, int], None] | None = None,
                     use_symmetry: bool = True) -> GammaPolynomial:
    """Least common multiple over ell of the anchor polynomials, primitive and positive.

    With ``use_symmetry`` one anchor polynomial is computed per class of
    ``anchor_classes``; the others are copied.
    """
    if not graph.is_connected():
        raise ValueError("graph must be connected")
    n = len(graph.vertices)
    classes = anchor_classes(graph) if use_symmetry else {ell: ell for ell in range(2, n + 1)}
    acc: list[Fraction] = [Fraction(1)]
    factors: dict[int, tuple[Fraction, ...]] = {}
    for ell in range(2, n + 1):
        rep = classes[ell]
        if rep in factors:
            factors[ell] = factors[rep]
            continue
        cb = None if progress is None else (lambda a, b, ell=ell: progress(ell, a, b))
        p = anchor_polynomial(graph, ell, order, cb)
        factors[ell] = tuple(p)
        acc = up.lcm(acc, p)
    return GammaPolynomial(tuple(up.primitive(acc)), factors)


def annihilator(root) -> list[Fraction]:
    """Exact annihilating polynomial of a rational or a ``RealRoot``."""
    if isinstance(root, (int, Fraction)):
        r = Fraction(root)
        return up.primitive([-r, Fraction(1)])
    if isinstance(root, up.RealRoot):
        return list(root.factor)
    return up.primitive(root)


def spectrum_membership(graph: Graph, root) -> bool:
    """True when some anchoring admits a solution with gamma a root of m.

    m is the exact annihilator of ``root``: a linear polynomial for a rational, the
    attached irreducible factor for an irrational ``RealRoot``, or a coefficient
    list given directly.
    """
    m = annihilator(root)
    reps = sorted(set(anchor_classes(graph).values()))
    for ell in reps:
        system = equation_system(graph, ell)
        ring = system[0].ring
        gi = ring.nvars - 1
        mpoly = Poly(ring, {tuple(i if k == gi else 0 for k in range(ring.nvars)): c
                            for i, c in enumerate(m) if c})
        if not is_unit_ideal(system + [mpoly]):
            return True
    return False


def classify_roots(graph: Graph, gp: GammaPolynomial) -> list[tuple[up.RealRoot, bool]]:
    """Real roots of the gamma-polynomial with their spectrum membership."""
    if gp.trivial:
        return []
    seen: list[tuple[up.RealRoot, bool]] = []
    for r in up.real_roots(list(gp.coeffs)):
        seen.append((r, spectrum_membership(graph, r)))
    return seen
