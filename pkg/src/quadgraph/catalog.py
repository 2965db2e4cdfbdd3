"""Small named graphs used throughout the package and its tests."""

from __future__ import annotations

from itertools import combinations

from quadgraph.graph import Graph


def cycle(n: int, prefix: str = "") -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return Graph.from_edges([(f"{prefix}{i}", f"{prefix}{(i + 1) % n}") for i in range(n)])


def path(n: int) -> Graph:
    if n < 2:
        raise ValueError("a path needs at least 2 vertices")
    return Graph.from_edges([(str(i), str(i + 1)) for i in range(n - 1)])


def complete(n: int) -> Graph:
    if n < 2:
        raise ValueError("need at least 2 vertices")
    return Graph.from_edges(combinations(range(n), 2))


def complete_bipartite(m: int, n: int) -> Graph:
    """K_{m,n} with sides x1..xm and y1..yn, the x side listed first."""
    xs = [f"x{i + 1}" for i in range(m)]
    ys = [f"y{j + 1}" for j in range(n)]
    return Graph.from_edges([(x, y) for x in xs for y in ys], vertices=xs + ys)


def star(n: int) -> Graph:
    """K_{1,n} with centre ``c`` and leaves ``l1..ln``."""
    return Graph.from_edges([("c", f"l{i + 1}") for i in range(n)])


def prism() -> Graph:
    """Two concentric triangles 0-1-2 and 3-4-5 joined by the spokes i, i+3."""
    return Graph.from_edges([(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3),
                             (0, 3), (1, 4), (2, 5)])


def five_chorded() -> Graph:
    """The 5-cycle a-b-c-d-e with the chords d-a and d-b (no constant-gamma states)."""
    return Graph.from_edges([("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"),
                             ("e", "a"), ("d", "a"), ("d", "b")])


def tetrahedron() -> Graph:
    return complete(4)


def octahedron() -> Graph:
    """Cross-polytope skeleton on +-e_i; vertices 2i and 2i+1 are antipodal."""
    return Graph.from_edges([(a, b) for a, b in combinations(range(6), 2) if a // 2 != b // 2])


def cube() -> Graph:
    """Hypercube skeleton in dimension 3: vertices are bit strings, edges flip one bit."""
    verts = [format(i, "03b") for i in range(8)]
    return Graph.from_edges(
        [(verts[a], verts[b]) for a, b in combinations(range(8), 2) if bin(a ^ b).count("1") == 1],
        vertices=verts,
    )


def lift_example() -> Graph:
    """A centre ``c`` joined to four outer vertices forming a 4-cycle."""
    outer = ["p", "q", "r", "s"]
    edges = [("c", v) for v in outer]
    edges += [(outer[i], outer[(i + 1) % 4]) for i in range(4)]
    return Graph.from_edges(edges)


NAMED = {
    "C3": lambda: cycle(3),
    "C4": lambda: cycle(4),
    "C5": lambda: cycle(5),
    "C6": lambda: cycle(6),
    "K4": lambda: complete(4),
    "K5": lambda: complete(5),
    "K23": lambda: complete_bipartite(2, 3),
    "K33": lambda: complete_bipartite(3, 3),
    "prism": prism,
    "five": five_chorded,
    "octahedron": octahedron,
    "cube": cube,
}


def named(name: str) -> Graph:
    try:
        return NAMED[name]()
    except KeyError:
        raise ValueError(f"unknown graph {name!r}; choose from {sorted(NAMED)}") from None
