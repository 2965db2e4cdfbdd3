"""Configurations, configured stars, regular polytopes and invariant frameworks.

A configuration is a set of points v_1..v_n in R^k with zero sum and
U U^t = rho I for the matrix U with columns v_l.  A configured star is an
N x n matrix W with W W^t = rho I + sigma u u^t whose columns sum to
sqrt(n(sigma + rho)) u.  Projecting a configured star to the plane gives
gamma = sigma/(sigma + rho) whatever the orthogonal transformation applied
first; frameworks built from such stars keep their gamma under every rotation.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from itertools import combinations, product

import numpy as np

from quadgraph.catalog import complete
from quadgraph.graph import DEFAULT_TOL, Graph, gamma_from_star

GOLDEN = (1 + math.sqrt(5)) / 2


class NotConfiguredError(ValueError):
    """Raised when a matrix does not decompose as a configured star."""


@dataclass(frozen=True)
class Configuration:
    """Columns of ``points`` (shape k x n) with zero sum and U U^t = rho I."""

    points: np.ndarray
    rho: float

    @property
    def dim(self) -> int:
        return self.points.shape[0]

    @property
    def size(self) -> int:
        return self.points.shape[1]

    def residual(self) -> float:
        u = self.points
        gram = u @ u.T - self.rho * np.eye(self.dim)
        return float(max(np.abs(gram).max(), np.abs(u.sum(axis=1)).max()))


def as_configuration(points, tol: float = DEFAULT_TOL) -> Configuration:
    """Validate a k x n matrix as a configuration and read off rho."""
    u = np.atleast_2d(np.asarray(points, dtype=float))
    k = u.shape[0]
    rho = float(np.trace(u @ u.T) / k)
    conf = Configuration(u, rho)
    scale = max(1.0, rho)
    if rho <= 0 or conf.residual() > tol * scale:
        raise ValueError("points do not form a configuration")
    return conf


# -- configuration generators -------------------------------------------------


def roots_of_unity(n: int) -> Configuration:
    if n < 3:
        raise ValueError("need n >= 3")
    t = 2 * np.pi * np.arange(1, n + 1) / n
    return as_configuration(np.vstack([np.cos(t), np.sin(t)]))


def tetrahedron_points() -> np.ndarray:
    return np.array([[-1, -1, 1, 1], [-1, 1, -1, 1], [-1, 1, 1, -1]], dtype=float)


def cross_polytope(dim: int) -> Configuration:
    """The 2*dim points +-e_i, listed as e_1, -e_1, e_2, -e_2, ..."""
    if dim < 1:
        raise ValueError("need dim >= 1")
    cols = []
    for i in range(dim):
        for s in (1.0, -1.0):
            v = np.zeros(dim)
            v[i] = s
            cols.append(v)
    return as_configuration(np.array(cols).T)


def hypercube_points(dim: int) -> np.ndarray:
    return np.array(list(product((-1.0, 1.0), repeat=dim))).T


def icosahedron_points(lam: float = GOLDEN) -> np.ndarray:
    cols = []
    for s1, s2 in product((1, -1), repeat=2):
        cols.append((0, s1, s2 * lam))
        cols.append((s1, s2 * lam, 0))
        cols.append((s2 * lam, 0, s1))
    return np.array(cols, dtype=float).T


def dodecahedron_points(lam: float = GOLDEN) -> np.ndarray:
    inv = 1 / lam
    cols = []
    for s1, s2 in product((1, -1), repeat=2):
        cols.append((0, s1 * inv, s2 * lam))
        cols.append((s1 * lam, 0, s2 * inv))
        cols.append((s1 * inv, s2 * lam, 0))
    cols.extend(product((1, -1), repeat=3))
    return np.array(cols, dtype=float).T


def quad_configuration(lam: float, mu: float, tol: float = DEFAULT_TOL) -> Configuration:
    """The four points (-1, lam), (1, mu), (-1, -lam), (1, -mu); needs lam^2 + mu^2 = 2."""
    if lam == 0 or mu == 0 or abs(lam * lam + mu * mu - 2) > tol:
        raise ValueError("need non-zero lam, mu with lam^2 + mu^2 = 2")
    return as_configuration(np.array([[-1, 1, -1, 1], [lam, mu, -lam, -mu]], dtype=float))


def simplex_step(u: np.ndarray) -> np.ndarray:
    """From a regular (N-1)-simplex configuration in R^(N-1) to one in R^N."""
    n_pts = u.shape[1]  # N
    sig = float(np.linalg.norm(u[:, 0]))
    top = sig / math.sqrt(n_pts * n_pts - 1)
    new = np.zeros((u.shape[0] + 1, n_pts + 1))
    new[0, 0] = -n_pts * top
    new[0, 1:] = top
    new[1:, 1:] = u
    return new


def simplex_points(dim: int) -> np.ndarray:
    """Regular simplex with dim + 1 vertices, built inductively from the tetrahedron."""
    if dim == 1:
        return np.array([[-1.0, 1.0]])
    if dim == 2:
        return roots_of_unity(3).points
    u = tetrahedron_points()
    for _ in range(dim - 3):
        u = simplex_step(u)
    return u


def cone_extension(conf: Configuration) -> Configuration:
    """Append the point 0 and a new coordinate (c, ..., c, -n c), c = sqrt(rho/(n(n+1)))."""
    n = conf.size
    c = math.sqrt(conf.rho / (n * (n + 1)))
    top = np.hstack([conf.points, np.zeros((conf.dim, 1))])
    row = np.array([c] * n + [-n * c])
    return as_configuration(np.vstack([top, row]))


def bicone_extension(conf: Configuration) -> Configuration:
    """Append the points 0, 0 and a new coordinate (0, ..., 0, b, -b), b = sqrt(rho/2)."""
    b = math.sqrt(conf.rho / 2)
    top = np.hstack([conf.points, np.zeros((conf.dim, 2))])
    row = np.array([0.0] * conf.size + [b, -b])
    return as_configuration(np.vstack([top, row]))


def make_configuration(kind: str, **params) -> Configuration:
    """Named configurations: roots_of_unity(n), tetrahedron, cross_polytope(dim),
    icosahedron(lam), dodecahedron(lam), simplex(dim), hypercube(dim), quad(lam, mu)."""
    if kind == "roots_of_unity":
        return roots_of_unity(int(params["n"]))
    if kind == "tetrahedron":
        return as_configuration(tetrahedron_points())
    if kind == "cross_polytope":
        return cross_polytope(int(params.get("dim", 3)))
    if kind == "icosahedron":
        return as_configuration(icosahedron_points(float(params.get("lam", GOLDEN))))
    if kind == "dodecahedron":
        return as_configuration(dodecahedron_points(float(params.get("lam", GOLDEN))))
    if kind == "simplex":
        return as_configuration(simplex_points(int(params["dim"])))
    if kind == "hypercube":
        return as_configuration(hypercube_points(int(params["dim"])))
    if kind == "quad":
        return quad_configuration(float(params["lam"]), float(params["mu"]))
    raise ValueError(f"unknown configuration kind {kind!r}")


# -- configured stars and projections -----------------------------------------


@dataclass(frozen=True)
class StarInvariants:
    rho: float
    sigma: float
    u: np.ndarray

    @property
    def gamma(self) -> float:
        return self.sigma / (self.sigma + self.rho)


def star_invariants(w, tol: float = DEFAULT_TOL) -> StarInvariants:
    """Decompose W W^t = rho I + sigma u u^t with column sum sqrt(n(sigma+rho)) u."""
    w = np.asarray(w, dtype=float)
    big_n, n = w.shape
    if n < big_n:
        raise NotConfiguredError("need at least as many columns as rows")
    s = w.sum(axis=1)
    norm_s = float(np.linalg.norm(s))
    gram = w @ w.T
    scale = max(1.0, float(np.abs(gram).max()))
    if norm_s <= tol * math.sqrt(scale):
        raise NotConfiguredError("not a configured star: columns sum to zero")
    u = s / norm_s
    total = norm_s**2 / n  # sigma + rho
    rho = (float(np.trace(gram)) - total) / (big_n - 1)
    sigma = total - rho
    resid = np.abs(gram - rho * np.eye(big_n) - sigma * np.outer(u, u)).max()
    if rho <= 0 or total <= 0 or resid > tol * scale:
        raise NotConfiguredError("not a configured star")
    return StarInvariants(rho, sigma, u)


def standard_star(conf: Configuration, c: float) -> np.ndarray:
    """Configured star in standard position: the configuration lifted to height c."""
    return np.vstack([conf.points, np.full((1, conf.size), float(c))])


def random_orthogonal(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix: QR of a Gaussian matrix with sign-fixed R."""
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def check_orthogonal(a, tol: float = 1e-12) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or np.abs(a.T @ a - np.eye(a.shape[0])).max() > tol:
        raise ValueError("matrix is not orthogonal")
    return a


def project_with_transform(points, a=None) -> list[complex]:
    """z = first two coordinates of A x as a complex number, for every column x."""
    pts = np.asarray(points, dtype=float)
    if a is not None:
        pts = check_orthogonal(a) @ pts
    return [complex(x, y) for x, y in zip(pts[0], pts[1])]


def gamma_of_projection(zs: Sequence[complex], tol: float = DEFAULT_TOL) -> float | None:
    return gamma_from_star(list(zs), tol)


# -- frameworks -----------------------------------------------------------------


@dataclass(frozen=True)
class Framework:
    graph: Graph
    points: Mapping[str, np.ndarray]
    notes: tuple[str, ...] = ()
    expected: Mapping[str, float] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return len(next(iter(self.points.values())))

    def matrix(self) -> np.ndarray:
        return np.array([self.points[v] for v in self.graph.vertices]).T

    def field(self, a=None) -> dict[str, complex]:
        zs = project_with_transform(self.matrix(), a)
        return dict(zip(self.graph.vertices, zs))

    def star(self, x: str) -> np.ndarray:
        p = self.points[x]
        return np.array([self.points[y] - p for y in self.graph.neighbours(x)]).T


def framework_from_points(pts: np.ndarray, edges=None, names: Sequence[str] | None = None,
                          tol: float = 1e-9) -> Framework:
    """Framework on the columns of ``pts``; without ``edges``, join all pairs at minimal distance."""
    pts = np.asarray(pts, dtype=float)
    m = pts.shape[1]
    names = list(names) if names is not None else [str(i) for i in range(m)]
    if edges is None:
        dist = {(i, j): float(np.linalg.norm(pts[:, i] - pts[:, j])) for i, j in combinations(range(m), 2)}
        dmin = min(dist.values())
        edges = [(i, j) for (i, j), dv in dist.items() if dv <= dmin * (1 + tol)]
    graph = Graph.from_edges([(names[i], names[j]) for i, j in edges], vertices=names)
    return Framework(graph, {names[i]: pts[:, i].copy() for i in range(m)})


def polygon(p: int, radius: float = 1.0) -> Framework:
    t = 2 * np.pi * np.arange(p) / p
    pts = radius * np.vstack([np.cos(t), np.sin(t)])
    return framework_from_points(pts, [(i, (i + 1) % p) for i in range(p)])


def schlafli(symbol: Sequence[int], lam: float = GOLDEN) -> Framework:
    """Skeleton of a convex regular polytope from its Schlafli symbol.

    Supported: {p}; the five Platonic solids; and in any dimension the simplex
    {3,...,3}, the cross-polytope {3,...,3,4} and the hypercube {4,3,...,3}.
    """
    sym = tuple(int(s) for s in symbol)
    if len(sym) == 1:
        return polygon(sym[0])
    dim = len(sym) + 1
    if all(s == 3 for s in sym):
        return framework_from_points(simplex_points(dim))
    if all(s == 3 for s in sym[:-1]) and sym[-1] == 4:
        return framework_from_points(cross_polytope(dim).points)
    if sym[0] == 4 and all(s == 3 for s in sym[1:]):
        return framework_from_points(hypercube_points(dim))
    if sym == (3, 5):
        return framework_from_points(icosahedron_points(lam))
    if sym == (5, 3):
        return framework_from_points(dodecahedron_points(lam))
    raise ValueError(f"unsupported Schlafli symbol {sym}")


def _vertex_figure(fw: Framework, x: str, centre: np.ndarray) -> tuple[np.ndarray, float, float, float]:
    """(configuration U, rho, a, c) of the star at x relative to the axis through ``centre``."""
    p = fw.points[x]
    axis = centre - p
    a = float(np.linalg.norm(axis))
    e = axis / a
    w = fw.star(x)
    heights = e @ w
    u = w - np.outer(e, heights)
    # express the orthogonal part in a basis of the complement of e
    basis = np.linalg.svd(np.eye(len(e)) - np.outer(e, e))[0][:, : len(e) - 1]
    coords = basis.T @ u
    rho = float(np.trace(coords @ coords.T) / coords.shape[0])
    return coords, rho, a, float(heights.mean())


@dataclass(frozen=True)
class DoubleCone:
    framework: Framework
    height: float
    gamma_lat: float
    gamma_apex: float


def double_cone(polytope: Framework, height: float | None = None,
                tol: float = DEFAULT_TOL) -> DoubleCone:
    """The double cone on a regular polytope skeleton, with apexes at +-b on a new axis.

    The invariant height is b = sqrt(rho/2), rho being the configuration invariant of
    the vertex figure.  ``height`` overrides b (which breaks invariance unless equal).
    """
    pts = polytope.matrix()
    centre = pts.mean(axis=1)
    if np.abs(centre).max() > tol:
        pts = pts - centre[:, None]
        polytope = Framework(polytope.graph, {v: polytope.points[v] - centre for v in polytope.graph.vertices})
    x0 = polytope.graph.vertices[0]
    coords, rho, a, c = _vertex_figure(polytope, x0, np.zeros(pts.shape[0]))
    if rho <= 0:
        raise ValueError("degenerate configuration")
    gram = coords @ coords.T
    if np.abs(gram - rho * np.eye(gram.shape[0])).max() > 1e-6 * max(1.0, rho):
        raise ValueError("vertex figure is not a configuration; is the polytope regular?")
    n = coords.shape[1]
    m = pts.shape[1]
    rho_p = float(np.trace(pts @ pts.T) / pts.shape[0])
    b = math.sqrt(rho / 2)
    gamma_lat = (n + 2) * (2 * a * a + n * c * c - rho) / (n * c + 2 * a) ** 2
    gamma_apex = (m * rho - 2 * rho_p) / (m * rho)
    h = b if height is None else float(height)
    dim = pts.shape[0] + 1
    points = {v: np.append(polytope.points[v], 0.0) for v in polytope.graph.vertices}
    top, bottom = "apex+", "apex-"
    points[top] = np.append(np.zeros(dim - 1), h)
    points[bottom] = np.append(np.zeros(dim - 1), -h)
    edges = polytope.graph.edge_list()
    edges += [(apex, v) for apex in (top, bottom) for v in polytope.graph.vertices]
    graph = Graph.from_edges(edges, vertices=list(polytope.graph.vertices) + [top, bottom])
    expected = {v: gamma_lat for v in polytope.graph.vertices}
    expected.update({top: gamma_apex, bottom: gamma_apex})
    fw = Framework(graph, points, expected=expected if height is None else {})
    return DoubleCone(fw, h, gamma_lat, gamma_apex)


def polygon_gamma_lat(n: int) -> float:
    c = math.cos(2 * math.pi / n)
    return 2 * (1 - 2 * c + 2 * c * c) / (2 - c) ** 2


def polygon_gamma_apex(n: int) -> float:
    s2 = math.sin(2 * math.pi / n) ** 2
    return (2 * s2 - 1) / (2 * s2)


def complete_double_cone(conf: Configuration, close_apexes: bool = False) -> DoubleCone:
    """Complete graph on a configuration plus two apexes at +-sqrt(rho/2).

    Lateral gamma is (n+1)/(n+2) and apex gamma (n-2)/n.  Joining the apexes gives
    the complete graph on n + 2 vertices; for a unit regular polygon this makes
    gamma equal to (n+1)/(n+2) everywhere.
    """
    n = conf.size
    b = math.sqrt(conf.rho / 2)
    dim = conf.dim + 1
    names = [str(i) for i in range(n)]
    points = {names[i]: np.append(conf.points[:, i], 0.0) for i in range(n)}
    points["apex+"] = np.append(np.zeros(dim - 1), b)
    points["apex-"] = np.append(np.zeros(dim - 1), -b)
    edges = complete(n).edge_list() if n >= 2 else []
    edges += [(apex, v) for apex in ("apex+", "apex-") for v in names]
    if close_apexes:
        edges.append(("apex+", "apex-"))
    graph = Graph.from_edges(edges, vertices=names + ["apex+", "apex-"])
    gamma_lat = (n + 1) / (n + 2)
    gamma_apex = (n - 2) / n
    notes: list[str] = []
    expected = {v: gamma_lat for v in names}
    if close_apexes:
        apex_star = np.array([points[v] - points["apex+"] for v in names + ["apex-"]]).T
        try:
            closed = star_invariants(apex_star).gamma
        except NotConfiguredError:
            closed = float("nan")
        expected.update({"apex+": closed, "apex-": closed})
        gamma_apex = closed
    else:
        expected.update({"apex+": gamma_apex, "apex-": gamma_apex})
    if n == 2:
        notes.append("n = 2: apex gamma is 0 and the framework is a projected tetrahedron")
    return DoubleCone(Framework(graph, points, tuple(notes), expected), b, gamma_lat, gamma_apex)


def extend_star(n: int, b: float, gamma: float, x: float, tol: float = DEFAULT_TOL) -> float:
    """New star invariant after adding a vertex at position x on the axis of an invariant star.

    n external vertices whose centre of mass lies at distance b along the axis.
    """
    den = x + n * b
    if abs(den) <= tol * max(1.0, abs(n * b)):
        raise ZeroDivisionError("x = -n b: the new star is harmonic and gamma is undefined")
    return (n + 1) * (x * x + n * b * b * gamma) / den**2


# -- invariance probing ----------------------------------------------------------


@dataclass(frozen=True)
class ProbeReport:
    reference: dict[str, float | None]
    max_deviation: float
    max_imag: float
    degenerate: tuple[str, ...]
    trials: int

    def passed(self, tol: float = DEFAULT_TOL) -> bool:
        return self.max_deviation <= tol


def _star_gamma(zs: list[complex]) -> tuple[float, float] | None:
    n = len(zs)
    s = sum(zs)
    if abs(s) <= 1e-12 * max(1.0, max(abs(z) for z in zs)):
        return None
    ratio = n * sum(z * z for z in zs) / (s * s)
    return ratio.real, abs(ratio.imag)


def framework_gammas(fw: Framework, a=None) -> dict[str, tuple[float, float] | None]:
    phi = fw.field(a)
    out = {}
    for x in fw.graph.vertices:
        zs = [phi[y] - phi[x] for y in fw.graph.neighbours(x)]
        out[x] = _star_gamma(zs) if zs else None
    return out


def invariance_probe(fw: Framework, trials: int = 100, seed: int = 0) -> ProbeReport:
    """Largest change of per-vertex gamma over random orthogonal transformations.

    The reference value at each vertex is the identity projection, or the first
    trial where the vertex is not harmonic.  Vertices where the laplacian vanished
    in some projection are listed in ``degenerate``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    ref: dict[str, float | None] = {}
    degenerate: set[str] = set()
    max_dev = 0.0
    max_imag = 0.0
    for x, g in framework_gammas(fw).items():
        ref[x] = g[0] if g is not None else None
        if g is not None:
            max_imag = max(max_imag, g[1])
    for _ in range(trials):
        a = random_orthogonal(fw.dim, rng)
        for x, g in framework_gammas(fw, a).items():
            if g is None:
                degenerate.add(x)
                continue
            max_imag = max(max_imag, g[1])
            if ref[x] is None:
                ref[x] = g[0]
            max_dev = max(max_dev, abs(g[0] - ref[x]))
    return ProbeReport(ref, max(max_dev, max_imag), max_imag, tuple(sorted(degenerate)), trials)


# -- stacked structures -----------------------------------------------------------


def _real_quadratic_roots(qa: float, qb: float, qc: float, tol: float = 1e-14) -> list[float]:
    if abs(qa) <= tol:
        return [] if abs(qb) <= tol else [-qc / qb]
    disc = qb * qb - 4 * qa * qc
    if disc < -tol * max(1.0, qb * qb):
        return []
    r = math.sqrt(max(disc, 0.0))
    # numerically stable pair
    q = -0.5 * (qb + math.copysign(r, qb))
    roots = [q / qa, qc / q] if q != 0 else [0.0, 0.0]
    if disc <= tol * max(1.0, qb * qb):
        return [-qb / (2 * qa)]
    return sorted(roots, reverse=True)


def stack_cones_offset(n: int) -> list[float]:
    """Axis positions x of a new vertex above the apex of the polygon double cone
    at which the extended apex gamma equals the lateral gamma.

    The extended apex value is (n+1)(x^2 + n sin^2(2pi/n) - n/2)/(x + n sin(2pi/n))^2.
    """
    if n < 3:
        raise ValueError("need n >= 3")
    s = math.sin(2 * math.pi / n)
    c4 = math.cos(4 * math.pi / n)
    target = 2 * polygon_gamma_lat(n) / (n + 1)
    # (2x^2 - n cos(4pi/n)) = target (x + n s)^2
    return _real_quadratic_roots(2 - target, -2 * target * n * s, -n * c4 - target * (n * s) ** 2)


TILINGS = {"square-octagon": 4, "triangle-dodecagon": 3, "hexagon": 6}


@dataclass(frozen=True)
class LayerResult:
    gamma_lat: float
    roots: list[float]


def bisected_cone_layers(tiling: str, d: float | None = None, radius: float = 1.0,
                         tol: float = DEFAULT_TOL) -> LayerResult:
    """Layer distances for stacked double cones on a planar tiling.

    Each lateral vertex gains a bisecting neighbour at distance d along the axis of
    its vertex figure (default: the polygon side, as in the tiling).  The lateral
    gamma is then equated with the apex gamma after extending the apex by a vertical
    edge of length x, measured away from the cone; the real solutions x are returned.
    """
    if tiling not in TILINGS:
        raise ValueError(f"unsupported tiling {tiling!r}; choose from {sorted(TILINGS)}")
    p = TILINGS[tiling]
    a = radius
    c = 2 * a * math.sin(math.pi / p) ** 2
    rho = 2 * a * a * math.sin(2 * math.pi / p) ** 2
    if d is None:
        d = 2 * a * math.sin(math.pi / p)
    k = 2  # neighbours of a polygon vertex inside the polygon
    den = k * c + 2 * a - d
    if abs(den) <= tol:
        raise ZeroDivisionError("bisecting distance makes the lateral vertex harmonic")
    g_lat = (k + 3) * (k * c * c + 2 * a * a + d * d - rho) / den**2
    m = p
    b = math.sqrt(rho / 2)
    rho_p = m * a * a / 2
    # (m+1)(x^2 + m b^2 - rho_p) = g_lat (x - m b)^2
    roots = _real_quadratic_roots(m + 1 - g_lat, 2 * g_lat * m * b,
                                  (m + 1) * (m * b * b - rho_p) - g_lat * (m * b) ** 2)
    if not roots:
        raise ValueError("no real layer distance")
    return LayerResult(g_lat, roots)
