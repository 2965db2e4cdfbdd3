"""Line-oriented graph documents.

    # comment
    name <text>
    vertex <id>
    edge <id> <id>
    field <id> <re> <im>
    gamma <value>
    gamma_at <id> <value>
    point <id> <c1> ... <cN>

Reals are decimals or exact fractions ``a/b``.  Exact values are kept as
``Fraction`` so that a document serializes back to the same text.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from quadgraph.graph import Graph

Real = Fraction | float


class ParseError(ValueError):
    """Syntax or reference error; ``line`` is 1-based (0 when not tied to a line)."""

    def __init__(self, line: int, message: str) -> None:
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


def parse_real(token: str) -> Real:
    """Exact for integers and ``a/b``; float for decimals and exponents."""
    t = token.strip()
    if "/" in t or all(ch.isdigit() or ch in "+-" for ch in t):
        return Fraction(t)
    value = float(t)
    if value != value or value in (float("inf"), float("-inf")):
        raise ValueError(f"non-finite value {token!r}")
    return value


def format_real(x: Real) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return repr(float(x))


@dataclass
class GraphDocument:
    name: str = ""
    vertices: list[str] = field(default_factory=list)
    edges: list[tuple[str, str]] = field(default_factory=list)
    field_values: dict[str, tuple[Real, Real]] = field(default_factory=dict)
    gamma: Real | None = None
    gamma_at: dict[str, Real] = field(default_factory=dict)
    points: dict[str, tuple[Real, ...]] = field(default_factory=dict)

    @property
    def graph(self) -> Graph:
        return Graph.from_edges(self.edges, vertices=self.vertices)

    @property
    def phi(self) -> dict[str, complex] | None:
        if not self.field_values:
            return None
        return {v: complex(float(re), float(im)) for v, (re, im) in self.field_values.items()}

    def gamma_assignment(self) -> float | dict[str, float] | None:
        """The constant gamma, else the per-vertex map, else None."""
        if self.gamma is not None:
            return float(self.gamma)
        if self.gamma_at:
            return {v: float(g) for v, g in self.gamma_at.items()}
        return None

    def point_matrix(self) -> np.ndarray:
        return np.array([[float(c) for c in self.points[v]] for v in self.vertices]).T


def parse_graph(text: str) -> GraphDocument:
    doc = GraphDocument()
    declared: set[str] = set()
    seen_edges: set[frozenset[str]] = set()
    dims: set[int] = set()

    def need(lineno: int, v: str) -> None:
        if v not in declared:
            raise ParseError(lineno, f"unknown vertex {v!r}")

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *args = line.split()
        try:
            if key == "name":
                doc.name = line[len("name"):].strip()
            elif key == "vertex":
                _arity(lineno, args, 1)
                if args[0] in declared:
                    raise ParseError(lineno, f"duplicate vertex {args[0]!r}")
                declared.add(args[0])
                doc.vertices.append(args[0])
            elif key == "edge":
                _arity(lineno, args, 2)
                a, b = args
                need(lineno, a)
                need(lineno, b)
                if a == b:
                    raise ParseError(lineno, f"self-loop at {a!r}")
                e = frozenset((a, b))
                if e in seen_edges:
                    raise ParseError(lineno, f"duplicate edge {a}-{b}")
                seen_edges.add(e)
                doc.edges.append((a, b))
            elif key == "field":
                _arity(lineno, args, 3)
                need(lineno, args[0])
                if args[0] in doc.field_values:
                    raise ParseError(lineno, f"duplicate field value for {args[0]!r}")
                doc.field_values[args[0]] = (parse_real(args[1]), parse_real(args[2]))
            elif key == "gamma":
                _arity(lineno, args, 1)
                if doc.gamma is not None:
                    raise ParseError(lineno, "duplicate gamma")
                doc.gamma = parse_real(args[0])
            elif key == "gamma_at":
                _arity(lineno, args, 2)
                need(lineno, args[0])
                if args[0] in doc.gamma_at:
                    raise ParseError(lineno, f"duplicate gamma_at for {args[0]!r}")
                doc.gamma_at[args[0]] = parse_real(args[1])
            elif key == "point":
                if len(args) < 2:
                    raise ParseError(lineno, "point needs an id and at least one coordinate")
                need(lineno, args[0])
                if args[0] in doc.points:
                    raise ParseError(lineno, f"duplicate point for {args[0]!r}")
                doc.points[args[0]] = tuple(parse_real(c) for c in args[1:])
                dims.add(len(args) - 1)
            else:
                raise ParseError(lineno, f"unknown keyword {key!r}")
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(lineno, str(exc)) from None
    if len(dims) > 1:
        raise ParseError(0, "points have mixed dimensions")
    if doc.field_values and set(doc.field_values) != declared:
        missing = [v for v in doc.vertices if v not in doc.field_values]
        raise ParseError(0, f"field missing at {missing}")
    if doc.points and set(doc.points) != declared:
        missing = [v for v in doc.vertices if v not in doc.points]
        raise ParseError(0, f"point missing at {missing}")
    return doc


def _arity(lineno: int, args: list[str], n: int) -> None:
    if len(args) != n:
        raise ParseError(lineno, f"expected {n} argument(s), got {len(args)}")


def serialize_graph(doc: GraphDocument) -> str:
    lines = []
    if doc.name:
        lines.append(f"name {doc.name}")
    lines += [f"vertex {v}" for v in doc.vertices]
    lines += [f"edge {a} {b}" for a, b in doc.edges]
    for v in doc.vertices:
        if v in doc.field_values:
            re, im = doc.field_values[v]
            lines.append(f"field {v} {format_real(re)} {format_real(im)}")
    if doc.gamma is not None:
        lines.append(f"gamma {format_real(doc.gamma)}")
    for v in doc.vertices:
        if v in doc.gamma_at:
            lines.append(f"gamma_at {v} {format_real(doc.gamma_at[v])}")
    for v in doc.vertices:
        if v in doc.points:
            lines.append("point " + " ".join([v] + [format_real(c) for c in doc.points[v]]))
    return "\n".join(lines) + "\n"


def document_from(graph: Graph, phi=None, gamma: Real | None = None, points=None, name: str = "") -> GraphDocument:
    """Build a document from library objects; complex values become float pairs."""
    doc = GraphDocument(name=name, vertices=list(graph.vertices), edges=graph.edge_list())
    if phi is not None:
        doc.field_values = {v: _pair(phi[v]) for v in graph.vertices}
    if gamma is not None:
        doc.gamma = gamma if isinstance(gamma, Fraction) else float(gamma)
    if points is not None:
        doc.points = {v: tuple(float(c) for c in points[v]) for v in graph.vertices}
    return doc


def _pair(z) -> tuple[Real, Real]:
    if isinstance(z, (int, Fraction)):
        return Fraction(z), Fraction(0)
    z = complex(z)
    return float(z.real) + 0.0, float(z.imag) + 0.0
