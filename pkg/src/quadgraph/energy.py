"""Vertex energy of a state and the energy of closed equilateral polygons.

A closed polygon with M unit edges is charted by M - 3 exterior angles
sigma_1..sigma_{M-3}: the chain starts with the edge from 0 to 1 and turns by
sigma_j at its j-th interior vertex.  Two more unit edges close the chain back
to 0 when the chain end lies within distance 2 of the origin.  The side on
which the apex of the closing triangle sits is the branch (+1 or -1).
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from quadgraph.graph import DEFAULT_TOL, Field, Graph, gamma_from_star, star_differences

SINGULAR_EPS = 1e-8
LIMIT_STEP = 1e-5


class EnergyError(ValueError):
    """Raised when an energy is undefined (gamma >= 1 at degree >= 3, harmonic star)."""


class NotClosableError(ValueError):
    """Raised when the chain end is further than 2 from the origin."""


class SingularChartError(ValueError):
    """Raised when the chain end is (numerically) at the origin or at distance 2."""


# -- vertex energy -------------------------------------------------------------------


def exterior_angle(z1: complex, z2: complex) -> float:
    """Signed exterior angle at x for the path y1 -> x -> y2, with z_i = phi(y_i) - phi(x)."""
    return cmath.phase(z2 / -z1)


def vertex_energy(zs: Sequence[complex], gamma: float | None = None, tol: float = DEFAULT_TOL) -> float:
    """Energy of a state at one vertex from its star differences.

    Degree 2 uses 1 + cos(theta) with theta the exterior angle.  Higher degree
    uses (n - gamma(3 - 2 gamma)|sum z|^2 / sum |z|^2) / (2(1 - gamma)); gamma is
    read from the star when not given.  A constant star has energy 0.
    """
    zs = [complex(z) for z in zs]
    norm2 = sum(abs(z) ** 2 for z in zs)
    if norm2 <= tol * tol:
        return 0.0
    n = len(zs)
    if n == 1:
        raise EnergyError("energy is defined at vertices of degree at least 2")
    if n == 2:
        if abs(zs[0]) <= tol or abs(zs[1]) <= tol:
            raise EnergyError("degree-2 star with a repeated value has no exterior angle")
        return 1 + math.cos(exterior_angle(zs[0], zs[1]))
    if gamma is None:
        gamma = gamma_from_star(zs, tol)
        if gamma is None:
            raise EnergyError("harmonic star: pass gamma explicitly")
    if gamma >= 1:
        raise EnergyError("vertex energy needs gamma < 1 at degree >= 3")
    total = sum(zs)
    return (n - gamma * (3 - 2 * gamma) * abs(total) ** 2 / norm2) / (2 * (1 - gamma))


def total_energy(graph: Graph, phi: Field, gamma: float | dict[str, float] | None = None,
                 tol: float = DEFAULT_TOL) -> float:
    """Sum of vertex energies; ``gamma`` may be a constant, a per-vertex map or None."""
    out = 0.0
    for x in graph.vertices:
        g = gamma.get(x) if isinstance(gamma, dict) else gamma
        out += vertex_energy(star_differences(graph, phi, x), g, tol)
    return out


def polygon_energy(vertices: Sequence[complex]) -> float:
    """M + sum of cosines of the exterior angles of a closed polygon."""
    v = [complex(p) for p in vertices]
    m = len(v)
    edges = [v[(k + 1) % m] - v[k] for k in range(m)]
    cos_sum = 0.0
    for k in range(m):
        a, b = edges[k - 1], edges[k]
        cos_sum += (a.real * b.real + a.imag * b.imag) / (abs(a) * abs(b))
    return m + cos_sum


# -- chain quantities ----------------------------------------------------------------


def _partial_sums(sigma: np.ndarray) -> np.ndarray:
    """S[k, j] = sigma_k + ... + sigma_j for 1 <= k <= j <= m (1-based, zero elsewhere)."""
    m = len(sigma)
    c = np.concatenate([[0.0], np.cumsum(sigma)])
    S = np.zeros((m + 2, m + 2))
    for k in range(1, m + 1):
        for j in range(k, m + 1):
            S[k, j] = c[j] - c[k - 1]
    return S


@dataclass(frozen=True)
class ChainConfig:
    sigma: tuple[float, ...]
    branch: int = 1

    def __post_init__(self) -> None:
        if len(self.sigma) < 2:
            raise ValueError("a chain needs M >= 5, so at least two angles")
        if self.branch not in (1, -1):
            raise ValueError("branch must be +1 or -1")
        if any(abs(a) > math.pi + 1e-12 for a in self.sigma):
            raise ValueError("exterior angles lie in [-pi, pi]")

    @property
    def M(self) -> int:
        return len(self.sigma) + 3


@dataclass(frozen=True)
class ChainQuantities:
    s: float
    r: float
    t: float
    T: float
    cos_theta1: float
    cos_theta2: float
    cos_theta3: float
    energy_plus: float
    energy_minus: float
    singular: bool = False
    limits: tuple[float, float] = field(default=(math.nan, math.nan))

    def energy(self, branch: int = 1) -> float:
        return self.energy_plus if branch == 1 else self.energy_minus


def chain_lengths(sigma: Sequence[float]) -> tuple[float, float, float]:
    """(s, r, t): distances 0 to chain end, 0 to the vertex before it, and 1 to the chain end."""
    phases = np.concatenate([[0.0], np.cumsum(np.asarray(sigma, dtype=float))])
    e = np.exp(1j * phases)
    return float(abs(e.sum())), float(abs(e[:-1].sum())), float(abs(e[1:].sum()))


def _T(sigma: np.ndarray) -> float:
    m = len(sigma)
    S = _partial_sums(sigma)
    return float(sum(math.sin(S[1, j]) + math.sin(S[j, m]) for j in range(1, m + 1)))


def _closed_form(sigma: np.ndarray, branch: int) -> tuple[float, float, float, float, float]:
    s, r, t = chain_lengths(sigma)
    T = _T(sigma)
    M = len(sigma) + 3
    base = M - 1.5 + float(np.cos(sigma).sum()) + (r * r + t * t) / 4
    root = math.sqrt(max(4 - s * s, 0.0))
    return base + branch * root / (2 * s) * T, s, r, t, T


def chain_energy(sigma: Sequence[float], branch: int = 1) -> float:
    """Closed-form energy of the closed polygon; raises on a singular or open chain."""
    sig = np.asarray(sigma, dtype=float)
    s, _, _ = chain_lengths(sig)
    _check_closable(s)
    if s <= SINGULAR_EPS:
        raise SingularChartError("chain end at the origin; use chain_quantities for the limit")
    return _closed_form(sig, branch)[0]


def _check_closable(s: float) -> None:
    if s > 2 + 1e-12:
        raise NotClosableError(f"s = {s:.6g} > 2: the chain cannot be closed")


def chain_quantities(sigma: Sequence[float]) -> ChainQuantities:
    """s, r, t, T, the closing cosines (+ branch) and the energy on both branches.

    At s = 0 the closing edges pivot freely: theta2 = +-pi, theta1 and theta3
    are undefined (nan) and the result is flagged singular.  The energies
    reported there are the limits along sigma + h(1, ..., 1) with h -> 0+, and
    ``limits`` holds the + branch limits from both sides.
    """
    sig = np.asarray(sigma, dtype=float)
    s, r, t = chain_lengths(sig)
    _check_closable(s)
    if s <= SINGULAR_EPS:
        plus_hi = _one_sided_limit(sig, 1, 1)
        plus_lo = _one_sided_limit(sig, 1, -1)
        minus_hi = _one_sided_limit(sig, -1, 1)
        return ChainQuantities(s, r, t, _T(sig), math.nan, -1.0, math.nan,
                               plus_hi, minus_hi, True, (plus_lo, plus_hi))
    e_plus, _, _, _, T = _closed_form(sig, 1)
    e_minus = _closed_form(sig, -1)[0]
    verts = chain_vertices(sig, 1)
    cos1, cos2, cos3 = _closing_cosines(verts)
    return ChainQuantities(s, r, t, T, cos1, cos2, cos3, e_plus, e_minus)


def _one_sided_limit(sig: np.ndarray, branch: int, side: int) -> float:
    """Limit of the energy along sigma + side*h*(1, ..., 1), h -> 0+, by Richardson extrapolation."""
    h = side * LIMIT_STEP
    return 2 * _closed_form(sig + h, branch)[0] - _closed_form(sig + 2 * h, branch)[0]


def closing_cosine_candidates(s: float, x: float) -> tuple[float, float]:
    """The two values (1/4s){+-sqrt(4-s^2) sqrt(4s^2-(x^2-s^2-1)^2) + s(x^2-s^2-1)} with x = r or t."""
    c = x * x - s * s - 1
    root = math.sqrt(max(4 - s * s, 0.0)) * math.sqrt(max(4 * s * s - c * c, 0.0))
    return (root + s * c) / (4 * s), (-root + s * c) / (4 * s)


def _closing_cosines(verts: list[complex]) -> tuple[float, float, float]:
    m = len(verts)
    edges = [verts[(k + 1) % m] - verts[k] for k in range(m)]

    def cos_at(k: int) -> float:
        a, b = edges[k - 1], edges[k]
        return (a.real * b.real + a.imag * b.imag) / (abs(a) * abs(b))

    return cos_at(m - 2), cos_at(m - 1), cos_at(0)


def chain_vertices(sigma: Sequence[float], branch: int = 1) -> list[complex]:
    """Vertices 0, 1, ..., chain end, apex of the closed polygon.

    The + branch puts the apex to the right of the direction from the chain end
    back to 0, which is the convex side for counter-clockwise turning.
    """
    sig = np.asarray(sigma, dtype=float)
    phases = np.concatenate([[0.0], np.cumsum(sig)])
    verts = [0j]
    for ph in phases:
        verts.append(verts[-1] + cmath.exp(1j * ph))
    end = verts[-1]
    s = abs(end)
    _check_closable(s)
    if s <= SINGULAR_EPS:
        raise SingularChartError("chain end at the origin: the apex is not determined")
    h = math.sqrt(max(1 - s * s / 4, 0.0))
    apex = end / 2 + branch * 1j * (end / s) * h
    return verts + [apex]


def exterior_angles(vertices: Sequence[complex]) -> list[float]:
    """Signed exterior angle at every vertex of a closed polygon, in vertex order."""
    v = [complex(p) for p in vertices]
    m = len(v)
    edges = [v[(k + 1) % m] - v[k] for k in range(m)]
    return [cmath.phase(edges[k] / edges[k - 1]) for k in range(m)]


# -- gradient ------------------------------------------------------------------------


def chain_gradient(sigma: Sequence[float], branch: int = 1, eps: float = SINGULAR_EPS) -> np.ndarray:
    """dE/dsigma by the recursion in ell, seeded with the explicit dE/dsigma_1.

    The r and t contributions enter through r dr and t dt, so vanishing r or t
    causes no division.
    """
    sig = np.asarray(sigma, dtype=float)
    m = len(sig)
    s, r, t = chain_lengths(sig)
    _check_closable(s)
    if s <= eps or 4 - s * s <= eps:
        raise SingularChartError(f"s = {s:.3g} is at the edge of the chart")
    S = _partial_sums(sig)
    T = _T(sig)
    root = branch * math.sqrt(4 - s * s)
    coef = root / (2 * s)
    # seed: -sin s1 + (r dr)/2 + (t dt)/2 - 2T/(s^2 root) ds + coef dT, with t dt = 0 at ell = 1
    s_ds1 = -sum(math.sin(S[1, j]) for j in range(1, m + 1))
    r_dr1 = -sum(math.sin(S[1, j]) for j in range(1, m))
    dT1 = sum(math.cos(S[1, j]) for j in range(1, m + 1)) + math.cos(S[1, m])
    grad = np.zeros(m)
    grad[0] = -math.sin(sig[0]) + r_dr1 / 2 - 2 * T / (s * s * root) * (s_ds1 / s) + coef * dT1
    for ell in range(2, m + 1):
        d = (sum(math.sin(S[k, ell - 1]) for k in range(1, ell))
             - sum(math.sin(S[ell, j]) for j in range(ell, m + 1)))
        grad[ell - 1] = (grad[ell - 2] + math.sin(sig[ell - 2]) - math.sin(sig[ell - 1])
                         - 0.5 * math.sin(S[1, ell - 1]) + 0.5 * math.sin(S[ell, m])
                         - coef * (math.cos(S[1, ell - 1]) - math.cos(S[ell, m]))
                         + (1 - 2 * T / (s ** 3 * root)) * d)
    return grad


# -- flow ----------------------------------------------------------------------------


@dataclass(frozen=True)
class FlowResult:
    trajectory: list[tuple[tuple[float, ...], float]]
    reason: str  # "converged", "iterations", "boundary" or "stalled"
    grad_norm: float

    @property
    def sigma(self) -> tuple[float, ...]:
        return self.trajectory[-1][0]

    @property
    def energy(self) -> float:
        return self.trajectory[-1][1]


def chain_flow(sigma0: Sequence[float], step: float = 0.1, iters: int = 10000, direction: int = -1,
               branch: int = 1, tol: float = 1e-9, eps: float = SINGULAR_EPS,
               max_halvings: int = 20) -> FlowResult:
    """Fixed-step gradient descent (direction -1) or ascent (+1) on the chain energy.

    A step that fails to move the energy the right way is halved up to
    ``max_halvings`` times; the shortened step then becomes the new step size.
    Stops when the gradient norm is at most ``tol``, at the iteration cap, when
    a step would leave the chart, or when halving is exhausted.
    """
    if direction not in (1, -1):
        raise ValueError("direction must be +1 (ascent) or -1 (descent)")
    sig = np.asarray(sigma0, dtype=float)
    s, _, _ = chain_lengths(sig)
    if not eps < s < 2:
        raise SingularChartError(f"start point has s = {s:.6g}, outside (eps, 2)")
    energy = chain_energy(sig, branch)
    traj = [(tuple(float(a) for a in sig), energy)]
    h = step
    for _ in range(iters):
        g = chain_gradient(sig, branch, eps)
        gn = float(np.linalg.norm(g))
        if gn <= tol:
            return FlowResult(traj, "converged", gn)
        for _ in range(max_halvings + 1):
            cand = sig + direction * h * g
            s_c, _, _ = chain_lengths(cand)
            if eps < s_c < 2 and np.all(np.abs(cand) <= math.pi):
                e_c = chain_energy(cand, branch)
                if direction * (e_c - energy) > 0:
                    break
            h /= 2
        else:
            s_c, _, _ = chain_lengths(sig + direction * step * g)
            reason = "boundary" if not eps < s_c < 2 else "stalled"
            return FlowResult(traj, reason, gn)
        sig, energy = cand, e_c
        traj.append((tuple(float(a) for a in sig), energy))
    g = chain_gradient(sig, branch, eps)
    gn = float(np.linalg.norm(g))
    return FlowResult(traj, "converged" if gn <= tol else "iterations", gn)


def regular_sigma(M: int, k: int) -> tuple[float, ...]:
    """All exterior angles equal to 2 pi k / M."""
    return tuple([2 * math.pi * k / M] * (M - 3))
