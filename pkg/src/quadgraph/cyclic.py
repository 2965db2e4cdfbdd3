"""Regular cyclic sequences: constant-gamma solutions on cycle graphs.

Real sequences come from integer polynomials with positive coefficients: the
increments are powers of a negative real root y of (x + 1) * sum(a_k x^k) and
gamma = 2(1 + y^2)/(1 - y)^2.  Complex sequences are closed equilateral walks
turning by +theta or -theta at every vertex, with gamma = 2cos(theta)/(cos(theta) - 1).
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from quadgraph import univariate as up
from quadgraph.catalog import cycle
from quadgraph.graph import DEFAULT_TOL, verify_state


@dataclass(frozen=True)
class CyclicSolution:
    values: tuple[complex, ...]
    gamma: float
    kind: str  # "real", "complex" or "segments"
    increments: tuple[int, ...] = ()  # powers of the fundamental increment, real case

    @property
    def order(self) -> int:
        return len(self.values)

    def as_field(self) -> dict[str, complex]:
        return {str(i): v for i, v in enumerate(self.values)}

    def residual(self) -> float:
        return verify_state(cycle(self.order), self.as_field(), self.gamma).max_residual


@dataclass(frozen=True)
class ExactGamma:
    """A real algebraic gamma: its value, minimal polynomial and isolating interval."""

    value: float
    minpoly: tuple[int, ...]  # descending integer coefficients, primitive
    lo: Fraction
    hi: Fraction

    @property
    def rational(self) -> Fraction | None:
        if len(self.minpoly) == 2:
            return Fraction(-self.minpoly[1], self.minpoly[0])
        return None

    def __str__(self) -> str:
        r = self.rational
        if r is not None:
            return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"
        poly = up.format_poly([Fraction(c) for c in reversed(self.minpoly)])
        return f"{self.value:.12g} (root of {poly})"


def recurrence_options(y_km2: complex, y_km1: complex) -> tuple[complex, complex]:
    """The two admissible next increments after y_km2, y_km1 when gamma is not 2."""
    if y_km2 == 0:
        raise ValueError("previous increment must be non-zero")
    if isinstance(y_km2, (int, Fraction)) and isinstance(y_km1, (int, Fraction)):
        return Fraction(y_km1) ** 2 / Fraction(y_km2), y_km2
    return y_km1 * y_km1 / y_km2, y_km2


def increment_polynomial(a_coeffs: Sequence[int]) -> list[int]:
    """Ascending coefficients b_k of (x + 1) * sum(a_k x^k)."""
    a = [int(c) for c in a_coeffs]
    if not a or any(c <= 0 for c in a):
        raise ValueError("coefficients must be strictly positive integers")
    return [(a[k] if k < len(a) else 0) + (a[k - 1] if k >= 1 else 0) for k in range(len(a) + 1)]


def arrange_powers(b: Sequence[int]) -> list[int]:
    """Cyclic word of powers: power k used b[k] times, neighbours differ by one.

    Greedy depth-first search starting from power 0, preferring the highest
    admissible next power and backtracking on dead ends.
    """
    counts = list(b)
    total = sum(counts)
    if counts[0] <= 0:
        raise ValueError("power 0 must occur")
    word = [0]
    counts[0] -= 1

    def extend() -> bool:
        if len(word) == total:
            return abs(word[-1] - word[0]) == 1
        last = word[-1]
        for nxt in (last + 1, last - 1):
            if 0 <= nxt < len(counts) and counts[nxt] > 0:
                counts[nxt] -= 1
                word.append(nxt)
                if extend():
                    return True
                word.pop()
                counts[nxt] += 1
        return False

    if not extend():
        raise ValueError(f"no admissible arrangement for multiplicities {list(b)}")
    return word


def _gamma_real(y):
    return 2 * (1 + y * y) / (1 - y) ** 2


def real_roots_of(a_coeffs: Sequence[int]) -> list[up.RealRoot]:
    """Distinct real roots of (x + 1) * sum(a_k x^k), ascending."""
    b = increment_polynomial(a_coeffs)
    return up.real_roots([Fraction(c) for c in b], width=1e-16)


def _default_root(roots: list[up.RealRoot]) -> up.RealRoot:
    others = [r for r in roots if r.exact != -1]
    if not others:
        return roots[0]
    return min(others, key=lambda r: abs(r.value))


def build_real_cyclic(a_coeffs: Sequence[int], root_choice: int | None = None) -> CyclicSolution:
    """Real regular cyclic sequence of order 2 * sum(a_k) starting at 0.

    ``root_choice`` indexes the distinct real roots in ascending order.  By default
    the root other than -1 closest to zero is used (-1 when there is no other).
    """
    b = increment_polynomial(a_coeffs)
    if sum(b) < 3:
        raise ValueError("the sequence needs order at least 3 (sum of a_k at least 2)")
    roots = real_roots_of(a_coeffs)
    if root_choice is None:
        root = _default_root(roots)
    else:
        if not 0 <= root_choice < len(roots):
            raise IndexError(f"root_choice must lie in 0..{len(roots) - 1}")
        root = roots[root_choice]
    y = root.exact if root.exact is not None else root.value
    word = arrange_powers(b)
    values = [y * 0]
    for k in word[:-1]:
        values.append(values[-1] + y ** k)
    gamma = _gamma_real(y)
    return CyclicSolution(tuple(complex(v) for v in values), float(gamma), "real", tuple(word))


def exact_real_gamma(a_coeffs: Sequence[int], root: up.RealRoot) -> ExactGamma:
    """Exact gamma = 2(1+y^2)/(1-y)^2 for a root y given by its factor."""
    if root.exact is not None:
        return _exact_from_fraction(_gamma_real(root.exact))
    import sympy

    x = sympy.Symbol("x")
    f = sum(sympy.Integer(int(c)) * x**i for i, c in enumerate(up.primitive(list(root.factor))))
    r = sympy.CRootOf(sympy.Poly(f, x), _root_index(root))
    return _exact_from_sympy(sympy.minimal_polynomial(_gamma_real(r), x), _gamma_real(root.value))


def _root_index(root: up.RealRoot) -> int:
    # sympy numbers the real roots of a polynomial in ascending order
    intervals = up.isolate_real_roots(list(root.factor))
    for i, (lo, hi) in enumerate(intervals):
        if lo < root.hi and root.lo <= hi:
            return i
    raise ValueError("root not found among the roots of its factor")


def _exact_from_fraction(q: Fraction) -> ExactGamma:
    q = Fraction(q)
    return ExactGamma(float(q), (q.denominator, -q.numerator), q, q)


def _exact_from_sympy(mp, value: float) -> ExactGamma:
    import sympy

    x = sympy.Symbol("x")
    coeffs = [int(c) for c in sympy.Poly(mp, x).all_coeffs()]
    asc = up.primitive([Fraction(c) for c in reversed(coeffs)])
    if len(asc) == 2:
        return _exact_from_fraction(-asc[0] / asc[1])
    for lo, hi in up.isolate_real_roots(asc):
        if lo <= Fraction(value) <= hi or abs(float((lo + hi) / 2) - value) < 1e-6:
            lo, hi = up.refine_root(asc, lo, hi, 1e-13)
            if abs(float((lo + hi) / 2) - value) < 1e-6:
                desc = tuple(int(c) for c in reversed(asc))
                return ExactGamma(float((lo + hi) / 2), desc, lo, hi)
    raise ArithmeticError("value is not a root of the computed minimal polynomial")


def complex_gamma_exact(m: int, d: int) -> ExactGamma:
    """Exact gamma = 2cos(t)/(cos(t) - 1) for the turning angle t = 2*pi*m/d."""
    import sympy

    x = sympy.Symbol("x")
    c = sympy.cos(2 * sympy.pi * sympy.Rational(m, d))
    expr = 2 * c / (c - 1)
    value = 2 * math.cos(2 * math.pi * m / d) / (math.cos(2 * math.pi * m / d) - 1)
    simple = sympy.nsimplify(expr)
    if simple.is_Rational:
        return _exact_from_fraction(Fraction(int(simple.p), int(simple.q)))
    return _exact_from_sympy(sympy.minimal_polynomial(expr, x), value)


def compositions(total: int):
    """All tuples of positive integers summing to ``total``."""
    if total <= 0:
        return
    for mask in range(1 << (total - 1)):
        parts, run = [], 1
        for i in range(total - 1):
            if mask >> i & 1:
                parts.append(run)
                run = 1
            else:
                run += 1
        parts.append(run)
        yield tuple(parts)


def complex_walks(n: int, tol: float = DEFAULT_TOL) -> list[tuple[int, int, tuple[int, ...], CyclicSolution]]:
    """Closed unit-step walks of n steps turning by +-theta, theta = 2*pi*m/d in (0, pi).

    d = k - l where k turns are positive and l negative, k + l = n.  Returns
    (m, d, signs, solution) for one sign pattern per distinct theta and every
    closing pattern is tried, so the result is exhaustive for those angles.
    """
    found: dict[tuple[int, int], tuple[int, int, tuple[int, ...], CyclicSolution]] = {}
    for signs in product((1, -1), repeat=n):
        d = sum(signs)
        if d <= 0:
            continue  # conjugation swaps the signs, and d = 0 is not of this form
        for m in range(1, n + 1):
            theta = 2 * math.pi * m / d
            if not 0 < theta < math.pi - 1e-12:
                continue
            key = _reduced(m, d)
            if key in found:
                continue
            psi, steps = 0.0, []
            for s in signs:
                steps.append(cmath.exp(1j * psi))
                psi += s * theta
            if abs(sum(steps)) > tol:
                continue
            values = [0j]
            for st in steps[:-1]:
                values.append(values[-1] + st)
            c = math.cos(theta)
            sol = CyclicSolution(tuple(values), 2 * c / (c - 1), "complex")
            found[key] = (key[0], key[1], signs, sol)
    return [found[k] for k in sorted(found, key=lambda k: k[0] / k[1])]


def _reduced(m: int, d: int) -> tuple[int, int]:
    g = math.gcd(m, d)
    return m // g, d // g


def segment_solution(n: int) -> CyclicSolution:
    """gamma = 2: two constant segments of lengths 2 and n - 2."""
    if n < 4:
        raise ValueError("segment colourings need at least 4 vertices")
    return CyclicSolution(tuple([1 + 0j, 1 + 0j] + [0j] * (n - 2)), 2.0, "segments")


def enumerate_cyclic_spectrum(n: int) -> list[tuple[ExactGamma, CyclicSolution]]:
    """Constant gamma values of the n-cycle with one witness each, ascending."""
    if n < 3:
        raise ValueError("n must be at least 3")
    out: dict[tuple, tuple[ExactGamma, CyclicSolution]] = {}

    def add(g: ExactGamma, sol: CyclicSolution) -> None:
        key = (g.minpoly, round(g.value, 9))
        out.setdefault(key, (g, sol))

    if n >= 4:
        add(_exact_from_fraction(Fraction(2)), segment_solution(n))
    if n % 2 == 0:
        for a in compositions(n // 2):
            roots = real_roots_of(a)
            for i, r in enumerate(roots):
                add(exact_real_gamma(a, r), build_real_cyclic(a, i))
    for m, d, _, sol in complex_walks(n):
        add(complex_gamma_exact(m, d), sol)
    return sorted(out.values(), key=lambda t: t[0].value)
