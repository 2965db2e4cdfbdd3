"""Exact univariate polynomials over the rationals and real-root isolation.

A polynomial is a list of ``Fraction`` coefficients in ascending powers with no
trailing zeros (the zero polynomial is the empty list).
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce as _fold

UPoly = list[Fraction]


def trim(p: Sequence) -> UPoly:
    out = [Fraction(c) for c in p]
    while out and out[-1] == 0:
        out.pop()
    return out


def degree(p: Sequence) -> int:
    return len(trim(p)) - 1


def add(p: Sequence, q: Sequence) -> UPoly:
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def sub(p: Sequence, q: Sequence) -> UPoly:
    return add(p, [-c for c in q])


def mul(p: Sequence, q: Sequence) -> UPoly:
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return trim(out)


def divmod_poly(p: Sequence, q: Sequence) -> tuple[UPoly, UPoly]:
    p, q = trim(p), trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(p)
    dq = len(q) - 1
    quo = [Fraction(0)] * max(len(p) - dq, 0)
    lc = q[-1]
    while len(rem) - 1 >= dq and rem:
        shift = len(rem) - 1 - dq
        c = rem[-1] / lc
        quo[shift] = c
        for i, b in enumerate(q):
            rem[shift + i] -= c * b
        rem = trim(rem)
    return trim(quo), rem


def evaluate(p: Sequence, x):
    acc = 0 * x
    for c in reversed(p):
        acc = acc * x + c
    return acc


def derivative(p: Sequence) -> UPoly:
    return trim([i * c for i, c in enumerate(p)][1:])


def content(p: Sequence) -> Fraction:
    p = trim(p)
    if not p:
        return Fraction(0)
    den = _fold(math.lcm, (c.denominator for c in p), 1)
    num = _fold(math.gcd, (int(c * den) for c in p), 0)
    return Fraction(num, den)


def primitive(p: Sequence) -> UPoly:
    """Integer coefficients with gcd 1 and positive leading coefficient."""
    p = trim(p)
    if not p:
        return []
    c = content(p)
    if p[-1] < 0:
        c = -c
    return [x / c for x in p]


def monic(p: Sequence) -> UPoly:
    p = trim(p)
    return [c / p[-1] for c in p] if p else []


def gcd(p: Sequence, q: Sequence) -> UPoly:
    """Greatest common divisor via the primitive remainder sequence; primitive result."""
    a, b = primitive(p), primitive(q)
    if not a:
        return b
    if not b:
        return a
    if len(a) < len(b):
        a, b = b, a
    while b:
        # pseudo-remainder keeps coefficients integral; take primitive part each step
        _, r = divmod_poly(a, b)
        a, b = b, primitive(r)
    return primitive(a)


def lcm(p: Sequence, q: Sequence) -> UPoly:
    g = gcd(p, q)
    quo, rem = divmod_poly(mul(p, q), g)
    assert not rem
    return primitive(quo)


def squarefree_decomposition(p: Sequence) -> list[tuple[UPoly, int]]:
    """Yun's algorithm: list of (primitive factor, multiplicity)."""
    p = primitive(p)
    if len(p) <= 1:
        return []
    out = []
    dp = derivative(p)
    a = gcd(p, dp)
    b = divmod_poly(p, a)[0]
    c = divmod_poly(dp, a)[0]
    dd = sub(c, derivative(b))
    i = 1
    while len(b) > 1:
        a = gcd(b, dd)
        if len(a) > 1:
            out.append((primitive(a), i))
        b = divmod_poly(b, a)[0]
        c = divmod_poly(dd, a)[0]
        dd = sub(c, derivative(b))
        i += 1
    return out


def squarefree_part(p: Sequence) -> UPoly:
    return primitive(divmod_poly(primitive(p), gcd(p, derivative(p)))[0])


def rational_roots(p: Sequence) -> list[Fraction]:
    """All rational roots by the rational-root test, ascending and without repeats."""
    p = primitive(p)
    if not p:
        raise ValueError("zero polynomial")
    roots: set[Fraction] = set()
    ints = [int(c) for c in p]
    # strip zero roots
    k = 0
    while k < len(ints) and ints[k] == 0:
        k += 1
    if k:
        roots.add(Fraction(0))
    ints = ints[k:]
    if len(ints) <= 1:
        return sorted(roots)
    a0, an = abs(ints[0]), abs(ints[-1])
    for num in _divisors(a0):
        for den in _divisors(an):
            for s in (1, -1):
                r = Fraction(s * num, den)
                if r not in roots and evaluate(p, r) == 0:
                    roots.add(r)
    return sorted(roots)


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def sturm_sequence(p: Sequence) -> list[UPoly]:
    p = trim(p)
    seq = [p, derivative(p)]
    while seq[-1]:
        _, r = divmod_poly(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    return [s for s in seq if s]


def _sign_changes(seq: list[UPoly], x: Fraction) -> int:
    signs = []
    for s in seq:
        v = evaluate(s, x)
        if v:
            signs.append(v > 0)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(p: Sequence, lo: Fraction, hi: Fraction, seq: list[UPoly] | None = None) -> int:
    """Number of distinct real roots in the half-open interval (lo, hi]."""
    seq = seq if seq is not None else sturm_sequence(squarefree_part(p))
    return _sign_changes(seq, lo) - _sign_changes(seq, hi)


def root_bound(p: Sequence) -> Fraction:
    """Cauchy bound: every root has modulus below the returned value."""
    p = trim(p)
    lc = abs(p[-1])
    return 1 + max(abs(c) / lc for c in p[:-1]) if len(p) > 1 else Fraction(1)


def isolate_real_roots(p: Sequence) -> list[tuple[Fraction, Fraction]]:
    """Disjoint intervals (lo, hi], each containing exactly one real root."""
    q = squarefree_part(p)
    if len(q) <= 1:
        return []
    seq = sturm_sequence(q)
    b = root_bound(q)
    out: list[tuple[Fraction, Fraction]] = []
    stack = [(-b, b)]
    while stack:
        lo, hi = stack.pop()
        n = count_roots(q, lo, hi, seq)
        if n == 0:
            continue
        if n == 1:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        stack.append((mid, hi))
        stack.append((lo, mid))
    return sorted(out)


def refine_root(p: Sequence, lo: Fraction, hi: Fraction, width: float = 1e-12) -> tuple[Fraction, Fraction]:
    """Bisect an isolating interval of a square-free p until it is narrower than width."""
    q = squarefree_part(p)
    if evaluate(q, hi) == 0:
        return hi, hi
    seq = sturm_sequence(q)
    while hi - lo > width:
        mid = (lo + hi) / 2
        if evaluate(q, mid) == 0:
            return mid, mid
        if count_roots(q, lo, mid, seq):
            hi = mid
        else:
            lo = mid
    return lo, hi


def factor_irreducible(p: Sequence) -> list[tuple[UPoly, int]]:
    """Irreducible factorisation over the rationals (primitive factors, multiplicities)."""
    import sympy

    x = sympy.Symbol("x")
    ints = primitive(p)
    expr = sum(sympy.Integer(int(c)) * x**i for i, c in enumerate(ints))
    _, facs = sympy.factor_list(expr, x)
    out = []
    for f, mult in facs:
        coeffs = sympy.Poly(f, x).all_coeffs()[::-1]
        out.append((primitive([Fraction(int(c)) for c in coeffs]), int(mult)))
    out.sort(key=lambda t: (len(t[0]), [float(c) for c in t[0]]))
    return out


@dataclass(frozen=True)
class RealRoot:
    """A real root: exact when rational, otherwise an isolating interval plus its factor."""

    lo: Fraction
    hi: Fraction
    factor: tuple[Fraction, ...]
    multiplicity: int

    @property
    def exact(self) -> Fraction | None:
        return self.lo if self.lo == self.hi else None

    @property
    def value(self) -> float:
        if self.lo == self.hi:
            return float(self.lo)
        return float((self.lo + self.hi) / 2)

    def __str__(self) -> str:
        if self.exact is not None:
            e = self.exact
            return str(e.numerator) if e.denominator == 1 else f"{e.numerator}/{e.denominator}"
        return f"{self.value:.12g} (root of {format_poly(list(self.factor))})"


def real_roots(p: Sequence, width: float = 1e-12) -> list[RealRoot]:
    """Real roots of p with multiplicity, ascending.

    Rational roots are exact; irrational roots are isolated by Sturm sequences and
    refined by bisection to ``width`` and carry their irreducible factor.
    """
    p = trim(p)
    if not p:
        raise ValueError("zero polynomial")
    out: list[RealRoot] = []
    for fac, mult in factor_irreducible(p):
        if len(fac) == 2:
            r = -fac[0] / fac[1]
            out.append(RealRoot(r, r, tuple(fac), mult))
            continue
        for lo, hi in isolate_real_roots(fac):
            lo, hi = refine_root(fac, lo, hi, width)
            out.append(RealRoot(lo, hi, tuple(fac), mult))
    out.sort(key=lambda r: r.value)
    return out


def format_poly(p: Sequence, var: str = "g") -> str:
    """Descending powers with integer coefficients when possible, e.g. ``3g - 2``."""
    p = trim(p)
    if not p:
        return "0"
    parts = []
    for i in range(len(p) - 1, -1, -1):
        c = p[i]
        if not c:
            continue
        a = abs(c)
        num = str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"
        if i == 0:
            body = num
        else:
            mono = var if i == 1 else f"{var}^{i}"
            body = mono if a == 1 else f"{num}{mono}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out
