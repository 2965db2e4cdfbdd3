"""Particles, their states and the events that change them.

A particle is a connected graph together with a finite catalogue of states.  A
state is a field phi, taken up to phi -> lam*phi + mu, whose star at every
vertex satisfies the equation for some real gamma <= 1.  Events are correlation
(join two particles by new edges), mutation (change the edges of one particle)
and separation (collapse, then split into connected components).
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from quadgraph.graph import DEFAULT_TOL, Field, Graph, GraphError, edge_scale, star_differences, verify_state
from quadgraph.lifting import collapse


class StateError(ValueError):
    """Raised when a field is not a state of the given graph."""


class CorrelationError(ValueError):
    """Raised when no compatible pair of representative states is found."""


class MutationError(ValueError):
    """Raised when a field is not a state of the mutated graph."""


# -- states ----------------------------------------------------------------------------


@dataclass(frozen=True)
class StateCheck:
    gammas: dict[str, float | None]  # None where gamma is free (constant or holomorphic harmonic star)
    failing: tuple[str, ...]

    @property
    def valid(self) -> bool:
        return not self.failing

    def assignment(self, free: float = 0.0) -> dict[str, float]:
        return {x: (free if g is None else g) for x, g in self.gammas.items()}

    @property
    def isostate_gamma(self) -> float | None:
        """The common gamma when the fixed gammas agree (free vertices accept any value)."""
        fixed = [g for g in self.gammas.values() if g is not None]
        if not fixed:
            return 0.0 if self.gammas else None
        if max(fixed) - min(fixed) <= 1e-9 * max(1.0, abs(fixed[0])):
            return fixed[0]
        return None


def check_state(graph: Graph, phi: Field, tol: float = DEFAULT_TOL) -> StateCheck:
    """Read gamma from every star and check it is real and at most 1.

    Scale-aware: differences are compared against the largest edge difference.
    """
    scale = math.sqrt(max(edge_scale(graph, phi), 0.0)) or 1.0
    gammas: dict[str, float | None] = {}
    failing = []
    for x in graph.vertices:
        zs = [z / scale for z in star_differences(graph, phi, x)]
        if not zs:
            gammas[x] = None
            continue
        n = len(zs)
        s = sum(zs)
        q = sum(z * z for z in zs)
        if abs(s) <= tol:
            gammas[x] = None
            if abs(q) > tol:
                failing.append(x)
            continue
        g = n * q / (s * s)
        if abs(g.imag) > tol * (1 + abs(g)) or g.real > 1 + tol:
            gammas[x] = None
            failing.append(x)
        else:
            gammas[x] = g.real
    return StateCheck(gammas, tuple(failing))


def same_class(phi: Field, psi: Field, vertices: Iterable[str], tol: float = DEFAULT_TOL) -> bool:
    """True when psi = lam*phi + mu on ``vertices`` for some lam != 0 (or both constant)."""
    vs = list(vertices)
    a = [complex(phi[v]) for v in vs]
    b = [complex(psi[v]) for v in vs]
    spread = max((abs(x - a[0]) for x in a), default=0.0)
    if spread <= tol:
        return max((abs(y - b[0]) for y in b), default=0.0) <= tol * max(1.0, abs(b[0]))
    i = max(range(len(a)), key=lambda k: abs(a[k] - a[0]))
    lam = (b[i] - b[0]) / (a[i] - a[0])
    if abs(lam) <= tol:
        return False
    mu = b[0] - lam * a[0]
    scale = max(1.0, max(abs(y) for y in b))
    return all(abs(lam * x + mu - y) <= 1e-7 * scale for x, y in zip(a, b))


@dataclass(frozen=True)
class Particle:
    graph: Graph
    states: tuple[dict[str, complex], ...] = ()
    name: str = ""

    def __post_init__(self) -> None:
        if not self.graph.is_connected():
            raise GraphError("a particle is a connected graph")
        for phi in self.states:
            missing = [v for v in self.graph.vertices if v not in phi]
            if missing:
                raise StateError(f"state misses vertices {missing}")
            chk = check_state(self.graph, phi)
            if not chk.valid:
                raise StateError(f"not a state at {list(chk.failing)}")

    @property
    def is_point(self) -> bool:
        return len(self.graph.vertices) == 1

    def with_state(self, phi: Mapping[str, complex]) -> "Particle":
        return Particle(self.graph, self.states + (dict(phi),), self.name)

    def knows(self, phi: Field, tol: float = DEFAULT_TOL) -> bool:
        if self.is_point:
            return True
        return any(same_class(s, phi, self.graph.vertices, tol) for s in self.states)


def point_particle(vertex: str) -> Particle:
    return Particle(Graph((vertex,), frozenset()), ({vertex: 0j},), vertex)


def _as_state(graph: Graph, phi: Field) -> dict[str, complex]:
    out = {v: complex(phi[v]) for v in graph.vertices}
    chk = check_state(graph, out)
    if not chk.valid:
        raise StateError(f"not a state at {list(chk.failing)}")
    # dual route: the per-vertex gammas must also pass the residual check
    if not verify_state(graph, out, chk.assignment()).passed:
        raise StateError("gamma assignment fails the residual check")
    return out


# -- events ----------------------------------------------------------------------------


@dataclass(frozen=True)
class EventResult:
    kind: str  # "correlate", "mutate" or "separate"
    particles: tuple[Particle, ...]
    fields: tuple[dict[str, complex], ...]
    checks: tuple[StateCheck, ...]
    witness: tuple[complex, complex] | None = None  # (lam, mu) applied to the second particle
    edits: tuple[tuple[str, str, str], ...] = ()  # ("add" | "remove", a, b)
    dropped: tuple[str, ...] = ()  # vertices left isolated by a collapse


def _candidate_maps(g1: Graph, phi1: Field, g2: Graph, phi2: Field, a: str, b: str):
    """(lam, mu) candidates placing phi2(b) one existing edge step away from phi1(a)."""
    diffs1 = [complex(phi1[y]) - complex(phi1[x]) for x, y in g1.edge_list()]
    diffs2 = [complex(phi2[y]) - complex(phi2[x]) for x, y in g2.edge_list()]
    for k in range(12):
        lam = cmath.exp(2j * math.pi * k / 12)
        steps = [1 + 0j] + diffs1 + [lam * d for d in diffs2]
        seen: list[complex] = []
        for d in steps:
            for dd in (d, -d):
                if abs(dd) <= DEFAULT_TOL or any(abs(dd - e) <= 1e-12 for e in seen):
                    continue
                seen.append(dd)
                yield lam, complex(phi1[a]) + dd - lam * complex(phi2[b])


def correlate(p1: Particle, phi1: Field, p2: Particle, phi2: Field,
              new_edges: Sequence[tuple[str, str]], witness: tuple[complex, complex] | None = None,
              prefer_isostate: bool = True, tol: float = DEFAULT_TOL) -> EventResult:
    """Join two particles by ``new_edges``.

    The combined field is phi1 on V1 and lam*phi2 + mu on V2.  With a witness
    (lam, mu) only that map is checked.  Otherwise lam runs over the 12th roots
    of unity and mu is chosen so that the first new edge repeats an existing
    edge difference (or the unit step); every candidate is verified, and an
    isostate is preferred when ``prefer_isostate`` is set.
    """
    v1, v2 = set(p1.graph.vertices), set(p2.graph.vertices)
    if v1 & v2:
        raise CorrelationError("particles share vertex ids")
    phi1 = _as_state(p1.graph, phi1)
    phi2 = _as_state(p2.graph, phi2)
    if not new_edges:
        raise CorrelationError("a correlation adds at least one edge")
    cross = [(a, b) if a in v1 else (b, a) for a, b in new_edges if (a in v1) != (b in v1)]
    for a, b in new_edges:
        if a not in v1 | v2 or b not in v1 | v2:
            raise GraphError(f"edge {a}-{b} references an unknown vertex")
    if not cross:
        raise CorrelationError("no new edge joins the two particles")
    graph = Graph(p1.graph.vertices + p2.graph.vertices, p1.graph.edges | p2.graph.edges).with_edges(add=new_edges)
    if witness is not None:
        candidates = [(complex(witness[0]), complex(witness[1]))]
    else:
        candidates = list(_candidate_maps(p1.graph, phi1, p2.graph, phi2, *cross[0]))
    best = None
    for lam, mu in candidates:
        phi = dict(phi1)
        phi.update({v: lam * z + mu for v, z in phi2.items()})
        chk = check_state(graph, phi, tol)
        if not chk.valid:
            continue
        if best is None:
            best = (lam, mu, phi, chk)
        if not prefer_isostate or chk.isostate_gamma is not None:
            best = (lam, mu, phi, chk)
            break
    if best is None:
        raise CorrelationError("no compatible pair of representative states")
    lam, mu, phi, chk = best
    merged = Particle(graph, (phi,), f"{p1.name}*{p2.name}" if p1.name or p2.name else "")
    edits = tuple(("add", a, b) for a, b in new_edges)
    return EventResult("correlate", (merged,), (phi,), (chk,), (lam, mu), edits)


def mutate(p: Particle, phi: Field, add: Sequence[tuple[str, str]] = (),
           remove: Sequence[tuple[str, str]] = (), tol: float = DEFAULT_TOL) -> EventResult:
    """Same vertices, new edges; accepted when phi is a state of the new graph."""
    phi = _as_state(p.graph, phi)
    for a, b in remove:
        if not p.graph.adjacent(a, b):
            raise MutationError(f"edge {a}-{b} is not present")
    for a, b in add:
        if a not in p.graph or b not in p.graph:
            raise GraphError(f"edge {a}-{b} references an unknown vertex")
    graph = p.graph.with_edges(add=add, remove=remove)
    if not graph.is_connected():
        raise MutationError("mutation disconnects the particle; use separate")
    chk = check_state(graph, phi, tol)
    if not chk.valid:
        raise MutationError(f"field is not a state of the mutated graph at {list(chk.failing)}")
    edits = tuple([("remove", a, b) for a, b in remove] + [("add", a, b) for a, b in add])
    return EventResult("mutate", (Particle(graph, (phi,), p.name),), (phi,), (chk,), None, edits)


def separate(p: Particle, phi: Field, tol: float = DEFAULT_TOL) -> EventResult:
    """Collapse (drop edges with equal end values and then isolated vertices) and split."""
    phi = _as_state(p.graph, phi)
    col = collapse(p.graph, phi, None, tol)
    if not col.graph.vertices:
        raise StateError("collapse leaves nothing")
    particles, fields, checks = [], [], []
    for i, comp in enumerate(col.graph.components()):
        sub = col.graph.subgraph(comp)
        part_phi = {v: phi[v] for v in comp}
        chk = check_state(sub, part_phi, tol)
        if not chk.valid:
            raise StateError(f"restricted field fails at {list(chk.failing)}")
        particles.append(Particle(sub, (part_phi,), f"{p.name}.{i + 1}" if p.name else ""))
        fields.append(part_phi)
        checks.append(chk)
    dropped = tuple(v for v in p.graph.vertices if v not in col.graph)
    edits = tuple(("remove", a, b) for a, b in col.removed_edges)
    return EventResult("separate", tuple(particles), tuple(fields), tuple(checks), None, edits, dropped)


# -- attaching a vertex ----------------------------------------------------------------


def attach_gamma(zs: Sequence[complex], w: complex) -> complex:
    """gamma at the origin after adding a neighbour at w: (k+1)(sum z^2 + w^2)/(sum z + w)^2."""
    zs = [complex(z) for z in zs]
    s = sum(zs) + w
    return (len(zs) + 1) * (sum(z * z for z in zs) + w * w) / (s * s)


def locus_cubic(zs: Sequence[complex]) -> dict[tuple[int, int], float]:
    """Coefficients {(i, j): c} of G(u, v) = Im[(A + w^2) conj(B + w)^2], w = u + iv.

    A = sum z^2 and B = sum z.  gamma is real exactly where G = 0 and w != -B;
    the cubic is singular at w = -B.
    """
    zs = [complex(z) for z in zs]
    A = sum(z * z for z in zs)
    B = sum(zs)
    b1, b2 = B.real, B.imag
    L = B.conjugate() ** 2
    K = 2 * A * B.conjugate()
    c: dict[tuple[int, int], float] = {}

    def add(i: int, j: int, val: float) -> None:
        c[(i, j)] = c.get((i, j), 0.0) + val

    # 2(b1 v - b2 u)(u^2 + v^2)
    add(2, 1, 2 * b1)
    add(0, 3, 2 * b1)
    add(3, 0, -2 * b2)
    add(1, 2, -2 * b2)
    # (Im A + Im L)(u^2 - v^2) + 2(Re L - Re A) u v
    add(2, 0, A.imag + L.imag)
    add(0, 2, -(A.imag + L.imag))
    add(1, 1, 2 * (L.real - A.real))
    # Im(K conj w) and the constant
    add(1, 0, K.imag)
    add(0, 1, -K.real)
    add(0, 0, (A * B.conjugate() ** 2).imag)
    return {k: v for k, v in c.items() if v != 0.0}


def eval_cubic(coeffs: Mapping[tuple[int, int], float], u, v):
    return sum(c * u ** i * v ** j for (i, j), c in coeffs.items())


@dataclass(frozen=True)
class Locus:
    points: np.ndarray  # complex points w on the locus
    singular: complex  # w = -sum z, where the new vertex would make the laplacian vanish


def attach_locus(zs: Sequence[complex], window: tuple[float, float, float, float] = (-3, 3, -3, 3),
                 resolution: int = 200, tol: float = 1e-9) -> Locus:
    """Points w in the window where attaching a neighbour at w keeps gamma real.

    Sign changes of the cubic are located along every grid row and column and
    refined by bisection to machine precision (well below ``tol``).  Points within ``tol`` of the singular
    point are discarded.
    """
    if not zs:
        raise ValueError("need at least one neighbour")
    zs = [complex(z) for z in zs]
    A = sum(z * z for z in zs)
    B = sum(zs)

    def G(u, v):
        # the factored form keeps relative accuracy near the singular point w = -B
        w = u + 1j * v
        return np.imag((A + w * w) * np.conj((B + w) ** 2))

    u0, u1, v0, v1 = window
    us = np.linspace(u0, u1, resolution)
    vs = np.linspace(v0, v1, resolution)
    singular = -B
    pts: list[complex] = []

    def bisect(f, lo: float, hi: float) -> float:
        flo = f(lo)
        for _ in range(200):  # to machine precision; tol only bounds the bracket width
            mid = (lo + hi) / 2
            if mid in (lo, hi):
                break
            fm = f(mid)
            if (fm > 0) == (flo > 0):
                lo, flo = mid, fm
            else:
                hi = mid
        return (lo + hi) / 2

    for v in vs:
        vals = G(us, v)
        for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
            u = bisect(lambda x: G(x, v), us[i], us[i + 1])
            pts.append(complex(u, v))
    for u in us:
        vals = G(u, vs)
        for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
            v = bisect(lambda y: G(u, y), vs[i], vs[i + 1])
            pts.append(complex(u, v))
    # a grid node lying exactly on the curve can pair with a neighbour of the wrong sign;
    # such brackets refine to an endpoint and are dropped by the residual test on gamma
    keep = [w for w in pts if abs(w - singular) > max(tol, 1e-6)
            and abs(attach_gamma(zs, w).imag) <= tol * (1 + abs(attach_gamma(zs, w)))]
    return Locus(np.array(keep, dtype=complex), singular)


# -- thermal time ----------------------------------------------------------------------


def thermal_time(graph: Graph) -> float:
    """sqrt(sum (deg - 2)^2) / (2 |E|)."""
    m = len(graph.edges)
    if m == 0:
        raise GraphError("thermal time needs at least one edge")
    return math.sqrt(sum((graph.degree(x) - 2) ** 2 for x in graph.vertices)) / (2 * m)


# -- a universe ------------------------------------------------------------------------


@dataclass
class Universe:
    """A list of particles, each held in the representative state it fell into."""

    particles: dict[str, tuple[Particle, dict[str, complex]]] = field(default_factory=dict)
    history: list[EventResult] = field(default_factory=list)

    def add(self, name: str, particle: Particle, phi: Field) -> None:
        if name in self.particles:
            raise ValueError(f"particle {name!r} already exists")
        taken = {v for p, _ in self.particles.values() for v in p.graph.vertices}
        if taken & set(particle.graph.vertices):
            raise ValueError("vertex ids must be unique across the universe")
        self.particles[name] = (particle, _as_state(particle.graph, phi))

    def graph(self) -> Graph:
        verts: tuple[str, ...] = ()
        edges: frozenset = frozenset()
        for p, _ in self.particles.values():
            verts += p.graph.vertices
            edges |= p.graph.edges
        return Graph(verts, edges)

    def correlate(self, name: str, a: str, b: str, new_edges, witness=None,
                  state_a: Field | None = None, state_b: Field | None = None) -> EventResult:
        pa, fa = self.particles[a]
        pb, fb = self.particles[b]
        res = correlate(pa, fa if state_a is None else state_a, pb, fb if state_b is None else state_b,
                        new_edges, witness)
        del self.particles[a], self.particles[b]
        self.particles[name] = (res.particles[0], res.fields[0])
        self.history.append(res)
        return res

    def mutate(self, name: str, add=(), remove=(), state: Field | None = None) -> EventResult:
        p, f = self.particles[name]
        res = mutate(p, f if state is None else state, add, remove)
        self.particles[name] = (res.particles[0], res.fields[0])
        self.history.append(res)
        return res

    def separate(self, name: str) -> EventResult:
        p, f = self.particles.pop(name)
        res = separate(p, f)
        for i, (q, g) in enumerate(zip(res.particles, res.fields)):
            self.particles[f"{name}.{i + 1}"] = (q, g)
        for v in res.dropped:
            self.particles[f"{name}.{v}"] = (point_particle(v), {v: complex(f[v])})
        self.history.append(res)
        return res

    def verify(self) -> bool:
        return all(check_state(p.graph, f).valid for p, f in self.particles.values())


# -- worked particles and the example evolution ----------------------------------------

W60 = complex(0.5, math.sqrt(3) / 2)
SQRT3I = complex(0, math.sqrt(3))


def kite(prefix: str = "") -> Graph:
    """4-cycle t-l-b-r with vertices top, left, bottom, right."""
    t, l, b, r = (f"{prefix}{v}" for v in "tlbr")
    return Graph.from_edges([(t, l), (l, b), (b, r), (r, t)], vertices=[t, l, b, r])


def kite_state(prefix: str = "") -> dict[str, complex]:
    """top 1, bottom 0, both sides at e^{i pi/3}: gamma 1 at top and bottom, 2/3 at the sides."""
    return {f"{prefix}t": 1 + 0j, f"{prefix}l": W60, f"{prefix}b": 0j, f"{prefix}r": W60}


def braced_kite(prefix: str = "") -> Graph:
    """The kite with the left-right diagonal added."""
    return kite(prefix).with_edges(add=[(f"{prefix}l", f"{prefix}r")])


def braced_kite_states(prefix: str = "") -> tuple[dict[str, complex], dict[str, complex]]:
    """(isostate gamma = 1 from the kite, state with the diagonal ends at -1 and 1)."""
    second = {f"{prefix}t": SQRT3I, f"{prefix}l": -1 + 0j, f"{prefix}b": -SQRT3I, f"{prefix}r": 1 + 0j}
    return kite_state(prefix), second


def two_triangles_state() -> dict[str, complex]:
    """The gamma = 1 state of two concentric triangles joined by spokes (catalog ``prism``)."""
    return {"0": 0j, "1": 1 + 0j, "2": W60, "3": 0j, "4": 1 + 0j, "5": W60}


def example_evolution() -> Universe:
    """Two kites mutate into braced kites, correlate along top and bottom edges, then the
    two diagonals flip to give the cube skeleton."""
    u = Universe()
    for pre in ("A:", "B:"):
        u.add(pre[0], Particle(kite(pre), (kite_state(pre),), pre[0]), kite_state(pre))
    for pre in ("A:", "B:"):
        u.mutate(pre[0], add=[(f"{pre}l", f"{pre}r")])
    _, second_a = braced_kite_states("A:")
    _, second_b = braced_kite_states("B:")
    u.correlate("AB", "A", "B", [("A:t", "B:t"), ("A:b", "B:b")], witness=(1, 2),
                state_a=second_a, state_b=second_b)
    u.mutate("AB", add=[("A:l", "B:l"), ("A:r", "B:r")], remove=[("A:l", "A:r"), ("B:l", "B:r")])
    return u
