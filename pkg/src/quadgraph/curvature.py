"""Vertex curvature in dimensions 2, 3 and 4, edge curvature and Descartes-type totals.

All angles are in absolute measure: a fraction of the full angle (2*pi in the
plane, the whole sphere in higher dimensions).  Vertex curvature is the deficit
1 - (boundary measure of the spherical convex hull of the lifted regular vertex
figure), evaluated through closed forms.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

SQRT5 = math.sqrt(5)


class CurvatureError(ValueError):
    """Raised when a curvature is undefined (gamma > 1, unsupported degree)."""


def _check_gamma(gamma: float) -> None:
    if gamma > 1:
        raise CurvatureError("vertex curvature needs gamma <= 1")


def _acos(x: float) -> float:
    return math.acos(max(-1.0, min(1.0, x)))


def curvature2(gamma: float) -> float:
    """Exterior angle at a degree-2 vertex: arccos(gamma/(gamma-2)) / (2 pi)."""
    _check_gamma(gamma)
    return _acos(gamma / (gamma - 2)) / (2 * math.pi)


def curvature3(gamma: float, n: int) -> float:
    """1 - (n/2pi) arccos[(1 + 2(1-gamma)cos(2pi/n)) / (3 - 2 gamma)].

    Only n in {3, 4, 5} are vertex figures of regular polyhedra; other n are
    evaluated with a warning.
    """
    _check_gamma(gamma)
    if n < 3:
        raise CurvatureError("need degree n >= 3")
    if n not in (3, 4, 5):
        warnings.warn(f"degree {n} is not a vertex figure of a regular polyhedron", stacklevel=2)
    arg = (1 + 2 * (1 - gamma) * math.cos(2 * math.pi / n)) / (3 - 2 * gamma)
    return 1 - n / (2 * math.pi) * _acos(arg)


def curvature4(gamma: float, n: int) -> float:
    """Closed forms for the vertex figures tetrahedron (4), octahedron (6),
    icosahedron (12) and dodecahedron (20).

    The icosahedron and dodecahedron rows use the configuration invariants
    rho = 4(1 + lam^2) and rho = 20 of the generating vertex sets; see
    ``curvature4_table`` for the rows written with rho = 2(1 + lam^2) and rho = 8.
    """
    _check_gamma(gamma)
    g = gamma
    if n == 4:
        return 2 - 3 / math.pi * _acos(g / (4 - 2 * g))
    if n == 6:
        return 3 - 6 / math.pi * _acos(1 / (5 - 3 * g))
    if n == 12:
        num = 11 + 7 * SQRT5 - 3 * (1 + SQRT5) * (g + 1)
        den = 2 * (23 + 7 * SQRT5 - 3 * (3 + SQRT5) * (g + 1))
        return 6 - 15 / math.pi * _acos(num / den)
    if n == 20:
        return 10 - 15 / math.pi * _acos((SQRT5 - 1 - g) / (2 * g - 5 + SQRT5))
    raise CurvatureError("4-curvature is tabulated only for degrees 4, 6, 12, 20")


def curvature4_table(gamma: float, n: int) -> float:
    """The 4-curvature rows with the icosahedral and dodecahedral invariants taken as
    2(1 + lam^2) and 8.  They agree with ``curvature4`` at gamma' = 1 - (1 - gamma)/2
    and gamma' = 1 - 2(1 - gamma)/5 respectively."""
    _check_gamma(gamma)
    g = gamma
    if n == 12:
        num = 6 * (SQRT5 + 1) * g - 11 - 7 * SQRT5
        den = 2 * (6 * (SQRT5 + 3) * g - 23 - 7 * SQRT5)
        return 6 - 15 / math.pi * _acos(num / den)
    if n == 20:
        num = 5 * g - 1 - 2 * SQRT5
        den = 2 * (-5 * g + 8 - SQRT5)
        return 10 - 15 / math.pi * _acos(num / den)
    return curvature4(gamma, n)


def vertex_curvature(gamma: float, n: int, dim: int = 3) -> float:
    """Dispatch on dimension; degree-1 vertices carry curvature 1 by convention."""
    if n == 1:
        return 1.0
    if dim == 2:
        if n != 2:
            raise CurvatureError("2-curvature is defined at degree-2 vertices")
        return curvature2(gamma)
    if dim == 3:
        return curvature3(gamma, n)
    if dim == 4:
        return curvature4(gamma, n)
    raise CurvatureError("closed forms exist for dimensions 2, 3 and 4 only")


@dataclass(frozen=True)
class CurvatureReport:
    deficits: dict[str, float]
    dim: int

    @property
    def total(self) -> float:
        return sum(self.deficits.values())

    def total_radians(self) -> float:
        return 2 * math.pi * self.total


def curvature_report(degrees: Mapping[str, int], gammas: Mapping[str, float], dim: int = 3) -> CurvatureReport:
    return CurvatureReport({x: vertex_curvature(gammas[x], n, dim) for x, n in degrees.items()}, dim)


# -- edge curvature ------------------------------------------------------------------


@dataclass(frozen=True)
class EdgeCurvature:
    theta: dict[tuple[str, str], float]
    normal: dict[tuple[str, str], float]
    mean_edge: dict[str, float]
    mean_normal: dict[str, float]
    ricci: dict[tuple[str, str], float]  # keyed (x, y): Ric_x(xy, xy)
    scalar: dict[str, float]

    def sectional(self, x: str, y1: str, y2: str) -> float:
        return self._theta(x, y1) * self._theta(x, y2)

    def _theta(self, x: str, y: str) -> float:
        return self.theta[(x, y)] if (x, y) in self.theta else self.theta[(y, x)]


def edge_curvature_suite(edges: list[tuple[str, str]], axes: Mapping[str, np.ndarray],
                         lengths: Mapping[tuple[str, str], float]) -> EdgeCurvature:
    """theta(e) = angle between the star axes at the ends of e, with the derived curvatures."""
    def key(a: str, b: str) -> tuple[str, str]:
        return (a, b) if (a, b) in lengths else (b, a)

    theta: dict[tuple[str, str], float] = {}
    for a, b in edges:
        if a not in axes or b not in axes:
            raise CurvatureError(f"missing axis at an end of edge {a}-{b}")
        ua = np.asarray(axes[a], dtype=float)
        ub = np.asarray(axes[b], dtype=float)
        cos = float(ua @ ub / (np.linalg.norm(ua) * np.linalg.norm(ub)))
        theta[(a, b)] = _acos(cos)
    normal = {e: (t / lengths[key(*e)] if lengths[key(*e)] > 0 else math.inf) for e, t in theta.items()}
    incident: dict[str, list[tuple[str, str]]] = {}
    for a, b in edges:
        incident.setdefault(a, []).append((a, b))
        incident.setdefault(b, []).append((a, b))

    def other(e: tuple[str, str], x: str) -> str:
        return e[1] if e[0] == x else e[0]

    mean_edge = {x: sum(theta[e] for e in es) / len(es) for x, es in incident.items()}
    mean_normal = {x: sum(normal[e] for e in es) / len(es) for x, es in incident.items()}
    ricci: dict[tuple[str, str], float] = {}
    scalar: dict[str, float] = {}
    for x, es in incident.items():
        total = 0.0
        for e in es:
            y = other(e, x)
            ell = lengths[key(*e)]
            s = sum(theta[e] * theta[f] for f in es if other(f, x) != y)
            ricci[(x, y)] = ell * ell * s
            total += s
        scalar[x] = total
    return EdgeCurvature(theta, normal, mean_edge, mean_normal, ricci, scalar)


def framework_axes(points: Mapping[str, np.ndarray], neighbours: Mapping[str, tuple[str, ...]]) -> dict[str, np.ndarray]:
    """Unit axis at each vertex, from the vertex towards the centre of mass of its neighbours."""
    axes = {}
    for x, nbrs in neighbours.items():
        v = np.mean([points[y] for y in nbrs], axis=0) - points[x]
        norm = np.linalg.norm(v)
        if norm == 0:
            raise CurvatureError(f"axis undefined at {x!r}")
        axes[x] = v / norm
    return axes


# -- totals and identities -------------------------------------------------------------


@dataclass(frozen=True)
class DescartesCheck:
    total: float
    expected: float
    residual: float


def descartes_total(deficits, expected: float = 2.0) -> DescartesCheck:
    """Total vertex curvature against the Descartes value (2 in absolute measure for polyhedra)."""
    if isinstance(deficits, CurvatureReport):
        total = deficits.total
    else:
        total = float(sum(deficits.values() if isinstance(deficits, Mapping) else deficits))
    return DescartesCheck(total, expected, total - expected)


GAMMA_600_QUOTED = 5 * (1 - 2 * SQRT5) / 3


def gamma_600_cell() -> float:
    """gamma of every planar projection of the 600-cell, -2(1 + sqrt 5)/3."""
    return -2 * (1 + SQRT5) / 3


def cell600_identity(gamma: float | None = None) -> tuple[float, float, float]:
    """(delta_v, delta_e, 120 delta_v - 720 delta_e) for the 600-cell."""
    dv = curvature4(gamma_600_cell() if gamma is None else gamma, 12)
    de = 1 - 5 / (2 * math.pi) * math.acos(1 / 3)
    return dv, de, 120 * dv - 720 * de


@dataclass(frozen=True)
class DoubleConeGap:
    total: float
    cos_angle_sum: float
    closed_form: float


def double_cone_gap() -> DoubleConeGap:
    """Total 3-curvature of the triangle double cone and the cosine that keeps it from 2."""
    apex = curvature3(1 / 3, 3)
    lat = curvature3(4 / 5, 4)
    angle = math.acos(1 / 7) + 2 * math.acos(5 / 7)
    return DoubleConeGap(3 * lat + 2 * apex, math.cos(angle), (1 - 240 * math.sqrt(2)) / 343)
