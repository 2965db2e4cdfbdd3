"""Graphs, fields and the pointwise operators of the quadratic difference equation.

A field is a plain mapping from vertex id to complex value.  A gamma assignment is
either a single real number or a mapping from vertex id to real.
"""

from __future__ import annotations

from collections.abc import Hashable, Iterable, Mapping
from dataclasses import dataclass, field
from typing import Union

DEFAULT_TOL = 1e-9

Field = Mapping[str, complex]
GammaAssignment = Union[float, Mapping[str, float]]
OneForm = Mapping[tuple[str, str], complex]


class GraphError(ValueError):
    """Raised on malformed graphs or references to unknown vertices."""


@dataclass(frozen=True)
class Graph:
    """Finite simple graph with ordered vertex ids.

    Vertices keep their insertion order, which fixes the iteration order of every
    report produced by the package.
    """

    vertices: tuple[str, ...]
    edges: frozenset[frozenset[str]]
    _adj: dict[str, tuple[str, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("duplicate vertex id")
        vset = set(self.vertices)
        adj: dict[str, list[str]] = {v: [] for v in self.vertices}
        for e in self.edges:
            if len(e) != 2:
                raise GraphError(f"self-loop or malformed edge {sorted(e)}")
            a, b = sorted(e)
            if a not in vset or b not in vset:
                raise GraphError(f"edge {a}-{b} references an undeclared vertex")
            adj[a].append(b)
            adj[b].append(a)
        order = {v: i for i, v in enumerate(self.vertices)}
        frozen = {v: tuple(sorted(ns, key=order.__getitem__)) for v, ns in adj.items()}
        object.__setattr__(self, "_adj", frozen)

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[Hashable, Hashable]],
                   vertices: Iterable[Hashable] = ()) -> "Graph":
        """Build a graph from an edge list; vertex ids are converted to strings.

        Extra isolated vertices may be passed through ``vertices``.  Vertex order is
        the order of first appearance, explicit vertices first.
        """
        order: dict[str, None] = {}
        for v in vertices:
            order.setdefault(str(v), None)
        es: set[frozenset[str]] = set()
        for a, b in edges:
            a, b = str(a), str(b)
            if a == b:
                raise GraphError(f"self-loop at {a}")
            e = frozenset((a, b))
            if e in es:
                raise GraphError(f"duplicate edge {a}-{b}")
            es.add(e)
            order.setdefault(a, None)
            order.setdefault(b, None)
        return cls(tuple(order), frozenset(es))

    def neighbours(self, x: str) -> tuple[str, ...]:
        try:
            return self._adj[x]
        except KeyError:
            raise GraphError(f"unknown vertex {x!r}") from None

    def degree(self, x: str) -> int:
        return len(self.neighbours(x))

    def adjacent(self, x: str, y: str) -> bool:
        return frozenset((x, y)) in self.edges

    def edge_list(self) -> list[tuple[str, str]]:
        """Edges as ordered pairs, sorted by vertex insertion order."""
        order = {v: i for i, v in enumerate(self.vertices)}
        pairs = [tuple(sorted(e, key=order.__getitem__)) for e in self.edges]
        return sorted(pairs, key=lambda p: (order[p[0]], order[p[1]]))  # type: ignore[return-value]

    def __contains__(self, x: object) -> bool:
        return x in self._adj

    def __len__(self) -> int:
        return len(self.vertices)

    def with_edges(self, add: Iterable[tuple[str, str]] = (),
                   remove: Iterable[tuple[str, str]] = ()) -> "Graph":
        es = set(self.edges)
        for a, b in remove:
            es.discard(frozenset((a, b)))
        for a, b in add:
            if a == b:
                raise GraphError(f"self-loop at {a}")
            es.add(frozenset((a, b)))
        return Graph(self.vertices, frozenset(es))

    def subgraph(self, keep: Iterable[str]) -> "Graph":
        ks = set(keep)
        verts = tuple(v for v in self.vertices if v in ks)
        es = frozenset(e for e in self.edges if e <= ks)
        return Graph(verts, es)

    def components(self) -> list[tuple[str, ...]]:
        seen: set[str] = set()
        comps = []
        for v in self.vertices:
            if v in seen:
                continue
            stack, comp = [v], []
            seen.add(v)
            while stack:
                u = stack.pop()
                comp.append(u)
                for w in self._adj[u]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            order = {x: i for i, x in enumerate(self.vertices)}
            comps.append(tuple(sorted(comp, key=order.__getitem__)))
        return comps

    def is_connected(self) -> bool:
        return len(self.vertices) > 0 and len(self.components()) == 1

    def relabel(self, mapping: Mapping[str, str]) -> "Graph":
        verts = tuple(mapping[v] for v in self.vertices)
        es = frozenset(frozenset(mapping[v] for v in e) for e in self.edges)
        return Graph(verts, es)


def gamma_at(gamma: GammaAssignment, x: str) -> float:
    if isinstance(gamma, Mapping):
        return float(gamma[x])
    return float(gamma)


def _check_vertex(graph: Graph, x: str) -> None:
    if x not in graph:
        raise GraphError(f"unknown vertex {x!r}")


def star_differences(graph: Graph, phi: Field, x: str) -> list[complex]:
    """The values z_k = phi(y_k) - phi(x) over the neighbours y_k of x."""
    _check_vertex(graph, x)
    px = complex(phi[x])
    return [complex(phi[y]) - px for y in graph.neighbours(x)]


def laplacian(graph: Graph, phi: Field, x: str) -> complex:
    zs = star_differences(graph, phi, x)
    if not zs:
        raise GraphError(f"vertex {x!r} is isolated")
    return sum(zs) / len(zs)


def d_squared(graph: Graph, phi: Field, x: str) -> complex:
    zs = star_differences(graph, phi, x)
    if not zs:
        raise GraphError(f"vertex {x!r} is isolated")
    return sum(z * z for z in zs) / len(zs)


def gamma_from_star(zs: list[complex], tol: float = DEFAULT_TOL) -> float | None:
    """Return n * sum(z^2) / (sum z)^2 when it is real, else None."""
    n = len(zs)
    s = sum(zs)
    if n == 0 or abs(s / n) <= tol:
        return None
    ratio = n * sum(z * z for z in zs) / (s * s)
    if abs(ratio.imag) <= tol * (1 + abs(ratio)):
        return ratio.real
    return None


def local_invariants(graph: Graph, phi: Field, x: str,
                     tol: float = DEFAULT_TOL) -> tuple[complex, complex, float | None]:
    """Return (laplacian, d_squared, gamma) at vertex x.

    gamma is None when the laplacian vanishes to ``tol`` or the ratio
    d_squared / laplacian**2 fails to be real.
    """
    zs = star_differences(graph, phi, x)
    if not zs:
        raise GraphError(f"vertex {x!r} is isolated")
    n = len(zs)
    lap = sum(zs) / n
    dsq = sum(z * z for z in zs) / n
    return lap, dsq, gamma_from_star(zs, tol)


def field_gammas(graph: Graph, phi: Field, tol: float = DEFAULT_TOL) -> dict[str, float | None]:
    """Per-vertex gamma read off from phi (None where undetermined or non-real)."""
    out: dict[str, float | None] = {}
    for x in graph.vertices:
        zs = star_differences(graph, phi, x)
        out[x] = gamma_from_star(zs, tol) if zs else None
    return out


@dataclass(frozen=True)
class StateReport:
    residuals: dict[str, complex]
    scale: float
    tol: float
    passed: bool

    @property
    def max_residual(self) -> float:
        return max((abs(r) for r in self.residuals.values()), default=0.0)

    def failing(self) -> list[str]:
        bound = self.tol * max(1.0, self.scale)
        return [x for x, r in self.residuals.items() if abs(r) > bound]


def edge_scale(graph: Graph, phi: Field) -> float:
    return max((abs(complex(phi[a]) - complex(phi[b])) ** 2 for a, b in graph.edge_list()),
               default=0.0)


def verify_state(graph: Graph, phi: Field, gamma: GammaAssignment,
                 tol: float = DEFAULT_TOL) -> StateReport:
    """Evaluate gamma * (laplacian)^2 - d_squared at every vertex.

    Isolated vertices carry no equation and are skipped.  The check passes when
    every residual is at most ``tol * max(1, scale)`` with ``scale`` the largest
    squared edge difference, so that it is insensitive to phi -> lam*phi + mu.
    """
    res: dict[str, complex] = {}
    for x in graph.vertices:
        zs = star_differences(graph, phi, x)
        if not zs:
            continue
        n = len(zs)
        lap = sum(zs) / n
        dsq = sum(z * z for z in zs) / n
        res[x] = gamma_at(gamma, x) * lap * lap - dsq
    scale = edge_scale(graph, phi)
    bound = tol * max(1.0, scale)
    passed = all(abs(r) <= bound for r in res.values())
    return StateReport(res, scale, tol, passed)


def normalize(phi: Field, x1: str, x2: str) -> dict[str, complex]:
    """Affinely rescale phi so that phi(x1) = 0 and phi(x2) = 1."""
    a, b = complex(phi[x1]), complex(phi[x2])
    if a == b:
        raise ValueError(f"field takes the same value at {x1!r} and {x2!r}")
    lam = 1 / (b - a)
    return {v: (complex(p) - a) * lam for v, p in phi.items()}


def affine(phi: Field, lam: complex, mu: complex) -> dict[str, complex]:
    return {v: lam * complex(p) + mu for v, p in phi.items()}


@dataclass(frozen=True)
class ColouringResult:
    field: dict[str, complex]
    gamma: dict[str, float]
    free: frozenset[str]

    @property
    def trivial(self) -> bool:
        """True when the field is constant on every edge."""
        return len(self.free) == len(self.gamma)


def coloring_field(graph: Graph, colour: Mapping[str, int], palette: list[complex],
                   tol: float = DEFAULT_TOL) -> ColouringResult:
    """Field from a vertex colouring, with the gamma predicted by the colouring lemmas.

    With two colours a vertex with k differently coloured neighbours gets
    gamma = n/k.  With N+1 >= 3 colours each vertex must see either no other
    colour or exactly one neighbour of every other colour, giving n/(N+1); the
    palette must then be a projected regular simplex, which is checked by
    evaluating the equation.  Vertices seeing only their own colour are "free":
    the equation holds there for every gamma and 1.0 is recorded.
    """
    if len(set(palette)) != len(palette):
        raise ValueError("palette values must be distinct")
    phi = {x: complex(palette[colour[x]]) for x in graph.vertices}
    k_colours = len(palette)
    gamma: dict[str, float] = {}
    free: set[str] = set()
    for x in graph.vertices:
        n = graph.degree(x)
        other = [colour[y] for y in graph.neighbours(x) if colour[y] != colour[x]]
        if not other:
            gamma[x] = 1.0
            free.add(x)
            continue
        if k_colours == 2:
            predicted = n / len(other)
        else:
            expected = sorted(c for c in range(k_colours) if c != colour[x])
            if sorted(other) != expected:
                raise ValueError(f"vertex {x!r} does not see exactly one neighbour of each other colour")
            predicted = n / k_colours
        got = gamma_from_star(star_differences(graph, phi, x), tol)
        if got is None or abs(got - predicted) > tol * max(1.0, abs(predicted)):
            raise ValueError(f"palette does not realise gamma = {predicted} at {x!r}")
        gamma[x] = predicted
    return ColouringResult(phi, gamma, frozenset(free))


# -- discrete calculus -------------------------------------------------------


def d(graph: Graph, phi: Field) -> dict[tuple[str, str], complex]:
    """The derivative 1-form, stored on both orientations of every edge."""
    out: dict[tuple[str, str], complex] = {}
    for a, b in graph.edge_list():
        v = complex(phi[b]) - complex(phi[a])
        out[(a, b)] = v
        out[(b, a)] = -v
    return out


def _oriented(omega: OneForm, x: str, y: str) -> complex:
    if (x, y) in omega:
        return complex(omega[(x, y)])
    return -complex(omega[(y, x)])


def codifferential(graph: Graph, omega: OneForm) -> dict[str, complex]:
    """d*omega(x) = -(1/n) sum over y ~ x of omega(x -> y)."""
    out: dict[str, complex] = {}
    for x in graph.vertices:
        ns = graph.neighbours(x)
        if not ns:
            continue
        out[x] = -sum(_oriented(omega, x, y) for y in ns) / len(ns)
    return out


def pointwise_product(graph: Graph, omega: OneForm, eta: OneForm, x: str) -> complex:
    return sum(_oriented(omega, x, y) * _oriented(eta, x, y) for y in graph.neighbours(x))


def form_product(graph: Graph, omega: OneForm, eta: OneForm) -> complex:
    """Global symmetric product: sum over unoriented edges of omega * eta."""
    return sum(_oriented(omega, a, b) * _oriented(eta, a, b) for a, b in graph.edge_list())


def function_product(graph: Graph, phi: Field, psi: Field) -> complex:
    """Global symmetric product of functions, weighted by degree."""
    return sum(graph.degree(x) * complex(phi[x]) * complex(psi[x]) for x in graph.vertices)


def scale_form(graph: Graph, xi: Field, omega: OneForm) -> dict[tuple[str, str], complex]:
    """The 1-form (xi omega)(x->y) = (xi(x) + xi(y))/2 * omega(x->y)."""
    out: dict[tuple[str, str], complex] = {}
    for a, b in graph.edge_list():
        v = 0.5 * (complex(xi[a]) + complex(xi[b])) * _oriented(omega, a, b)
        out[(a, b)] = v
        out[(b, a)] = -v
    return out


def laplacian_field(graph: Graph, phi: Field) -> dict[str, complex]:
    return {x: laplacian(graph, phi, x) for x in graph.vertices if graph.degree(x) > 0}


def weak_residual(graph: Graph, phi: Field, gamma: GammaAssignment, xi: Field) -> complex:
    """(lap phi, xi gamma lap phi) - 2 (d phi, xi d phi).

    This equals sum_x n(x) xi(x) (gamma(x) lap(x)^2 - d_squared(x)), so it vanishes
    for every indicator xi exactly when phi solves the equation pointwise.
    """
    lap = laplacian_field(graph, phi)
    weighted = {x: complex(xi[x]) * gamma_at(gamma, x) * lap[x] for x in lap}
    first = sum(graph.degree(x) * lap[x] * weighted[x] for x in lap)
    dphi = d(graph, phi)
    second = form_product(graph, dphi, scale_form(graph, xi, dphi))
    return first - 2 * second


def degree_weighted_weak_form(graph: Graph, phi: Field, gamma: GammaAssignment, xi: Field) -> complex:
    """The weak form with the degree-weighted second term (lap, xi gamma lap) - 2(d phi, n xi d phi)."""
    lap = laplacian_field(graph, phi)
    first = sum(graph.degree(x) * lap[x] * complex(xi[x]) * gamma_at(gamma, x) * lap[x] for x in lap)
    nxi = {x: graph.degree(x) * complex(xi[x]) for x in graph.vertices}
    dphi = d(graph, phi)
    return first - 2 * form_product(graph, dphi, scale_form(graph, nxi, dphi))


def corollary_pairing(graph: Graph, phi: Field, gamma: float) -> complex:
    """(gamma lap(lap phi) + 2 n lap phi + (1/n) <dn, dphi>, phi) for constant gamma."""
    lap = laplacian_field(graph, phi)
    laplap = laplacian_field(graph, lap)
    degrees = {x: complex(graph.degree(x)) for x in graph.vertices}
    dn, dphi = d(graph, degrees), d(graph, phi)
    total = {}
    for x in lap:
        n = graph.degree(x)
        total[x] = gamma * laplap[x] + 2 * n * lap[x] + pointwise_product(graph, dn, dphi, x) / n
    return sum(graph.degree(x) * total[x] * complex(phi[x]) for x in total)


# -- maps between graphs -----------------------------------------------------


def map_dilation(f: Mapping[str, str], source: Graph, target: Graph) -> dict[str, int] | None:
    """Dilation of a vertex map, or None when the map is not holomorphic.

    Raises ValueError if f does not send edges to edges or points.
    """
    for a, b in source.edge_list():
        fa, fb = f[a], f[b]
        if fa != fb and not target.adjacent(fa, fb):
            raise ValueError(f"edge {a}-{b} is not sent to an edge or a point")
    lam: dict[str, int] = {}
    for x in source.vertices:
        z = f[x]
        counts = {zp: 0 for zp in target.neighbours(z)}
        for xp in source.neighbours(x):
            if f[xp] != z:
                counts[f[xp]] += 1
        values = set(counts.values())
        if len(values) > 1:
            return None
        lam[x] = values.pop() if values else 0
    return lam


def pullback_gamma(f: Mapping[str, str], source: Graph, target: Graph,
                   mu: GammaAssignment) -> dict[str, float]:
    """gamma(x) = n(x) mu(f(x)) / (lam(x) m(f(x))) where the dilation is non-zero."""
    lam = map_dilation(f, source, target)
    if lam is None:
        raise ValueError("map is not holomorphic")
    return {x: source.degree(x) * gamma_at(mu, f[x]) / (lam[x] * target.degree(f[x]))
            for x in source.vertices if lam[x] != 0}
