"""Lifting planar stars to configured stars, and the induced edge lengths.

Given differences z_1..z_n at a vertex satisfying gamma(sum z)^2 = n sum z^2 with
gamma < 1, a configured star in R^N (3 <= N <= n) projects onto them.  For N = 3
the lift is the minimum Frobenius norm solution of a 3 x n linear system, unique up
to a sign; the sign can be fixed from an orientation (edge colouring plus volume form).
The mean squared edge of the lift defines a median edge length at every vertex, from
which edge lengths and a path metric on the (collapsed) graph follow.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from itertools import combinations

import networkx as nx
import numpy as np

from quadgraph.graph import (
    DEFAULT_TOL,
    Field,
    GammaAssignment,
    Graph,
    GraphError,
    edge_scale,
    field_gammas,
    gamma_at,
    star_differences,
)


class LiftError(ValueError):
    """Raised when a star cannot be lifted (gamma >= 1, zero data, bad dimension)."""


@dataclass(frozen=True)
class LiftParams:
    rho: float
    sigma: float
    u1: float
    u2: float
    degenerate: bool

    @property
    def u3_squared(self) -> float:
        return max(0.0, 1.0 - self.u1 * self.u1 - self.u2 * self.u2)


def _as_array(zs: Sequence[complex]) -> np.ndarray:
    return np.asarray([complex(z) for z in zs], dtype=complex)


def lift_params(zs: Sequence[complex], gamma: float, tol: float = DEFAULT_TOL) -> LiftParams:
    """rho, sigma and the planar part (u1, u2) of the axis of any lift of ``zs``."""
    z = _as_array(zs)
    n = len(z)
    if n < 2:
        raise LiftError("need at least two differences")
    if gamma >= 1:
        raise LiftError("lifting requires gamma < 1")
    sq = float(np.sum(np.abs(z) ** 2))
    if sq == 0:
        raise LiftError("all differences vanish")
    s = complex(z.sum())
    scale = max(sq, abs(s) ** 2, 1e-300)
    if abs(gamma * s * s / n - complex(np.sum(z * z))) > tol * scale:
        raise LiftError("differences do not satisfy the star equation for this gamma")
    rho = 0.5 * sq - gamma / (2 * n) * abs(s) ** 2
    sigma = gamma * rho / (1 - gamma)
    root = math.sqrt(n * (sigma + rho))
    u1, u2 = s.real / root, s.imag / root
    degenerate = abs(n * sq + (gamma - 2) * abs(s) ** 2) <= tol * n * scale
    return LiftParams(rho, sigma, u1, u2, degenerate)


# -- orientation -------------------------------------------------------------------


@dataclass(frozen=True)
class Orientation:
    """A proper edge colouring and a volume-form sign at each vertex."""

    colours: Mapping[frozenset, int]
    volume: Mapping[str, int]

    def colour(self, x: str, y: str) -> int:
        return self.colours[frozenset((x, y))]

    def sorted_neighbours(self, graph: Graph, x: str) -> list[str]:
        return sorted(graph.neighbours(x), key=lambda y: self.colour(x, y))

    def sign(self, x: str) -> int:
        return int(self.volume.get(x, 1))


def edge_colouring(graph: Graph) -> dict[frozenset, int]:
    """Proper edge colouring with colours 1..M when possible, else 1..M+1 (M = max degree)."""
    edges = sorted(graph.edge_list(), key=lambda e: -(graph.degree(e[0]) + graph.degree(e[1])))
    m = max((graph.degree(v) for v in graph.vertices), default=0)
    for k in (m, m + 1):
        found = _colour_edges(edges, k)
        if found is not None:
            return found
    raise RuntimeError("edge colouring failed")  # unreachable by Vizing's theorem


def _colour_edges(edges: list[tuple[str, str]], k: int) -> dict[frozenset, int] | None:
    used: dict[str, set[int]] = {}
    out: dict[frozenset, int] = {}

    def place(i: int) -> bool:
        if i == len(edges):
            return True
        a, b = edges[i]
        busy = used.setdefault(a, set()) | used.setdefault(b, set())
        for c in range(1, k + 1):
            if c not in busy:
                used[a].add(c)
                used[b].add(c)
                out[frozenset((a, b))] = c
                if place(i + 1):
                    return True
                used[a].discard(c)
                used[b].discard(c)
        return False

    return out if place(0) else None


def default_orientation(graph: Graph, volume: Mapping[str, int] | None = None) -> Orientation:
    return Orientation(edge_colouring(graph), dict(volume or {}))


# -- lifts ----------------------------------------------------------------------------


def _system(z: np.ndarray) -> np.ndarray:
    return np.vstack([z.real, z.imag, np.ones(len(z))])


def _null_basis(a: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (columns) of the null space of a."""
    _, s, vt = np.linalg.svd(a)
    rank = int(np.sum(s > tol * max(1.0, s[0] if len(s) else 1.0)))
    return vt[rank:].T


def _first_nonzero_minor(w: np.ndarray, tol: float = 1e-12) -> float:
    for cols in combinations(range(w.shape[1]), 3):
        det = float(np.linalg.det(w[:, cols]))
        if abs(det) > tol:
            return det
    return 0.0


def _fix_sign(row: np.ndarray, z: np.ndarray, sign: int | None) -> np.ndarray:
    """Pick +-row: by the sign of the first non-zero 3x3 minor when ``sign`` is given,
    otherwise so that the first entry that is not zero is positive."""
    if sign is not None:
        det = _first_nonzero_minor(np.vstack([z.real, z.imag, row]))
        if det != 0:
            return row if (det > 0) == (sign > 0) else -row
    nz = np.flatnonzero(np.abs(row) > 1e-12)
    if len(nz) and row[nz[0]] < 0:
        return -row
    return row


def _regular_row(z: np.ndarray, basis: np.ndarray, rho: float) -> list[np.ndarray]:
    """Rows sqrt(rho) * basis @ c, |c| = 1, making all lifted edges equal in length."""
    k = basis.shape[1]
    mod2 = np.abs(z) ** 2

    def spread(c: np.ndarray) -> np.ndarray:
        row = math.sqrt(rho) * basis @ (c / np.linalg.norm(c))
        lens = mod2 + row**2
        return lens - lens.mean()

    found: list[np.ndarray] = []
    if k == 1:
        cands = [np.array([1.0])]
    elif k == 2:
        m = 720
        step = 2 * math.pi / m
        ts = step * np.arange(m)
        vals = [float(np.sum(spread(np.array([math.cos(t), math.sin(t)])) ** 2)) for t in ts]
        cands = []
        for i in range(m):
            if vals[i] <= vals[i - 1] and vals[i] <= vals[(i + 1) % m]:
                cands.append(_refine_angle(spread, ts[i] - step, ts[i] + step))
    else:
        from scipy.optimize import least_squares

        rng = np.random.default_rng(0)
        cands = [least_squares(spread, rng.standard_normal(k)).x for _ in range(20)]
    for c in cands:
        if np.max(np.abs(spread(c))) <= 1e-9 * max(1.0, float(mod2.max())):
            row = math.sqrt(rho) * basis @ (c / np.linalg.norm(c))
            if not any(np.allclose(row, f, atol=1e-9) for f in found):
                found.append(row)
    return found


def _refine_angle(spread, lo: float, hi: float) -> np.ndarray:
    from scipy.optimize import minimize_scalar

    res = minimize_scalar(lambda t: float(np.sum(spread(np.array([math.cos(t), math.sin(t)])) ** 2)),
                          bounds=(lo, hi), method="bounded", options={"xatol": 1e-14})
    return np.array([math.cos(res.x), math.sin(res.x)])


def lift3(zs: Sequence[complex], gamma: float, sign: int | None = None,
          regular: bool = False, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Configured star (3 x n) in R^3 projecting onto ``zs``.

    ``sign`` is the volume-form value at the vertex (+1 or -1) with the columns
    already in colour order; the third row is chosen so that the first non-zero
    3 x 3 minor has that sign.  Without ``sign`` the default is u3 >= 0 and, when
    u3 = 0, a non-negative first non-zero entry.  ``regular`` asks, in the
    degenerate case, for the lift whose edges all have the same length.
    """
    z = _as_array(zs)
    n = len(z)
    if n < 3:
        raise LiftError("lift3 needs at least three differences")
    p = lift_params(z, gamma, tol)
    a = _system(z)
    aat = a @ a.T
    if not p.degenerate and np.linalg.det(aat) > tol * max(1.0, np.abs(a).max()) ** 6:
        u3 = math.sqrt(p.u3_squared)
        b = np.array([p.sigma * p.u1, p.sigma * p.u2, math.sqrt(n * (p.sigma + p.rho))]) * u3
        row = a.T @ np.linalg.solve(aat, b)  # minimum norm solution A^+ b
        if sign is not None:
            row = _fix_sign(row, z, sign)
    else:
        basis = _null_basis(a)
        if regular:
            rows = _regular_row(z, basis, p.rho)
            if not rows:
                raise LiftError("no regular lift exists for this star")
            row = rows[0]
            if sign is not None:
                for cand in rows:
                    det = _first_nonzero_minor(np.vstack([z.real, z.imag, cand]))
                    if det != 0 and (det > 0) == (sign > 0):
                        row = cand
                        break
            else:
                row = _fix_sign(row, z, None)
        else:
            # the unique direction when the null space is a line; otherwise the first basis vector
            row = _fix_sign(math.sqrt(p.rho) * basis[:, 0], z, sign)
    return np.vstack([z.real, z.imag, row])


def liftN(zs: Sequence[complex], gamma: float, N: int, basis_seed: int | None = None,
          sign: int = 1, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Configured star (N x n) projecting onto ``zs`` for 3 <= N <= n.

    The axis is rotated so that (u3, ..., uN) points along the third coordinate.
    The remaining rows are sqrt(rho) times orthonormal vectors in the null space of
    the 3 x n system; ``basis_seed`` picks a random orthonormal frame there
    (default: the singular-vector basis).
    """
    z = _as_array(zs)
    n = len(z)
    if N < 3 or N > n:
        raise LiftError("need 3 <= N <= number of differences")
    p = lift_params(z, gamma, tol)
    third = lift3(z, gamma, tol=tol)[2]
    if sign < 0:
        third = -third
    if N == 3:
        return np.vstack([z.real, z.imag, third])
    a = _system(z)
    if p.degenerate:
        a = np.vstack([a, third])  # extra rows must also be orthogonal to the third row
    basis = _null_basis(a)
    need = N - 3
    if basis.shape[1] < need:
        raise LiftError("not enough room for the requested dimension")
    if basis_seed is not None:
        rng = np.random.default_rng(basis_seed)
        q, r = np.linalg.qr(rng.standard_normal((basis.shape[1], basis.shape[1])))
        basis = basis @ (q * np.sign(np.diag(r)))
    extra = math.sqrt(p.rho) * basis[:, :need].T
    extra = np.array([_fix_sign(r, z, None) for r in extra])
    return np.vstack([z.real, z.imag, third, extra])


def lift_at(graph: Graph, phi: Field, x: str, gamma: GammaAssignment | None = None,
            N: int = 3, orientation: Orientation | None = None,
            regular: bool = False) -> tuple[list[str], np.ndarray]:
    """Lift the star of x; columns follow the colour order when an orientation is given."""
    if x not in graph:
        raise GraphError(f"unknown vertex {x!r}")
    g = _gammas(graph, phi, gamma)[x]
    if g is None:
        raise LiftError(f"gamma undefined at {x!r}; pass it explicitly")
    nbrs = orientation.sorted_neighbours(graph, x) if orientation else list(graph.neighbours(x))
    zs = [complex(phi[y]) - complex(phi[x]) for y in nbrs]
    if N == 3:
        sign = orientation.sign(x) if orientation else None
        return nbrs, lift3(zs, g, sign=sign, regular=regular)
    return nbrs, liftN(zs, g, N)


def lift_residual(w: np.ndarray, rho: float, sigma: float) -> float:
    """Largest violation of W W^t = rho I + sigma u u^t and sum x = sqrt(n(sigma+rho)) u."""
    big_n, n = w.shape
    s = w.sum(axis=1)
    u = s / math.sqrt(n * (sigma + rho))
    gram = w @ w.T - rho * np.eye(big_n) - sigma * np.outer(u, u)
    return float(max(np.abs(gram).max(), abs(np.linalg.norm(u) - 1)))


# -- lengths and distance -----------------------------------------------------------


def median_edge_length_sq(zs: Sequence[complex], gamma: float, N: int = 3) -> float:
    z = _as_array(zs)
    n = len(z)
    if gamma >= 1:
        raise LiftError("median edge length requires gamma < 1")
    if n == 0:
        raise LiftError("isolated vertex")
    if not np.any(np.abs(z) > 0):
        return 0.0
    dim = min(N, n)
    rho = 0.5 * float(np.sum(np.abs(z) ** 2)) - gamma / (2 * n) * abs(complex(z.sum())) ** 2
    return (dim + (1 - dim) * gamma) * rho / (n * (1 - gamma))


def median_edge_length(zs: Sequence[complex], gamma: float, N: int = 3) -> float:
    """r with r^2 = [N + (1 - N) gamma] rho / (n (1 - gamma)); degree-2 stars use N = 2."""
    return math.sqrt(max(0.0, median_edge_length_sq(zs, gamma, N)))


def dphi_norm_sq(graph: Graph, phi: Field) -> float:
    return sum(abs(complex(phi[a]) - complex(phi[b])) ** 2 for a, b in graph.edge_list())


def _gammas(graph: Graph, phi: Field, gamma: GammaAssignment | None) -> dict[str, float | None]:
    if gamma is None:
        return field_gammas(graph, phi)
    return {x: gamma_at(gamma, x) for x in graph.vertices}


def vertex_lengths(graph: Graph, phi: Field, gamma: GammaAssignment | None = None,
                   N: int = 3, absolute: bool = False) -> dict[str, float | None]:
    """Median edge length at each vertex (None where gamma >= 1 or undefined)."""
    gam = _gammas(graph, phi, gamma)
    norm = dphi_norm_sq(graph, phi) if absolute else 1.0
    out: dict[str, float | None] = {}
    for x in graph.vertices:
        g = gam[x]
        zs = star_differences(graph, phi, x)
        if not zs or g is None or g >= 1:
            out[x] = None
            continue
        r2 = median_edge_length_sq(zs, g, N)
        out[x] = math.sqrt(r2 / norm) if norm > 0 else 0.0
    return out


def edge_lengths(graph: Graph, phi: Field, gamma: GammaAssignment | None = None,
                 N: int = 3, absolute: bool = False) -> dict[tuple[str, str], float]:
    """Length (r(x) + r(y))/2 of every edge whose endpoints both have gamma < 1."""
    r = vertex_lengths(graph, phi, gamma, N, absolute)
    return {(a, b): (r[a] + r[b]) / 2 for a, b in graph.edge_list()
            if r[a] is not None and r[b] is not None}


@dataclass(frozen=True)
class Collapse:
    graph: Graph
    gamma: dict[str, float]  # rescaled gamma on the surviving vertices
    removed_edges: tuple[tuple[str, str], ...]


def collapse(graph: Graph, phi: Field, gamma: GammaAssignment | None = None,
             tol: float = DEFAULT_TOL) -> Collapse:
    """Delete edges joining equal values, then isolated vertices; gamma becomes n~ gamma / n."""
    bound = tol * math.sqrt(max(1.0, edge_scale(graph, phi)))
    gone = [(a, b) for a, b in graph.edge_list() if abs(complex(phi[a]) - complex(phi[b])) <= bound]
    reduced = graph.with_edges(remove=gone)
    keep = [v for v in reduced.vertices if reduced.degree(v) > 0]
    result = reduced.subgraph(keep)
    gam = _gammas(graph, phi, gamma)
    rescaled = {}
    for v in keep:
        g = gam[v]
        if g is not None:
            rescaled[v] = result.degree(v) * g / graph.degree(v)
    return Collapse(result, rescaled, tuple(gone))


def is_collapsed(graph: Graph, phi: Field, tol: float = DEFAULT_TOL) -> bool:
    bound = tol * math.sqrt(max(1.0, edge_scale(graph, phi)))
    return all(abs(complex(phi[a]) - complex(phi[b])) > bound for a, b in graph.edge_list()) and all(
        graph.degree(v) > 0 for v in graph.vertices)


def path_distance(graph: Graph, phi: Field, x: str, y: str, N: int = 3,
                  gamma: GammaAssignment | None = None, absolute: bool = False) -> float:
    """Least total edge length over paths from x to y (shortest path search)."""
    for v in (x, y):
        if v not in graph:
            raise GraphError(f"unknown vertex {v!r}")
    if not is_collapsed(graph, phi):
        raise ValueError("graph must be collapsed with respect to the field first")
    lengths = edge_lengths(graph, phi, gamma, N, absolute)
    g = nx.Graph()
    g.add_nodes_from(graph.vertices)
    g.add_weighted_edges_from((a, b, w) for (a, b), w in lengths.items())
    try:
        return float(nx.dijkstra_path_length(g, x, y))
    except nx.NetworkXNoPath:
        raise ValueError(f"no admissible path from {x!r} to {y!r} (disconnected or gamma >= 1)") from None


@dataclass(frozen=True)
class EmbeddingBound:
    min_degree: int
    verdict: str


def embedding_bound(graph: Graph, phi: Field, gamma: GammaAssignment | None = None) -> EmbeddingBound:
    """With gamma < 1 everywhere, no invariant embedding exists in R^N for N above the minimum degree."""
    gam = _gammas(graph, phi, gamma)
    bad = [v for v, g in gam.items() if g is None or g >= 1]
    if bad:
        raise ValueError(f"bound needs gamma < 1 everywhere; fails at {bad}")
    n0 = min(graph.degree(v) for v in graph.vertices)
    return EmbeddingBound(n0, f"no invariant embedding for N > {n0}")
