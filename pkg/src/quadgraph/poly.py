"""Sparse multivariate polynomials with exact rational coefficients.

Terms are stored as a dict from exponent tuples to ``Fraction`` (or ``int``).
Variables are ordered from most to least significant, so that comparing exponent
tuples with Python's built-in tuple ordering is exactly the lexicographic order.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from fractions import Fraction
from math import gcd, lcm
from numbers import Rational
from typing import Union

Monomial = tuple[int, ...]
Coeff = Union[int, Fraction]


class Ring:
    """An ordered list of variable names; the first is the largest in lex order."""

    __slots__ = ("names", "nvars", "_index")

    def __init__(self, names: Sequence[str]):
        self.names = tuple(names)
        self.nvars = len(self.names)
        if len(set(self.names)) != self.nvars:
            raise ValueError("variable names must be distinct")
        self._index = {n: i for i, n in enumerate(self.names)}

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Ring) and other.names == self.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"Ring({list(self.names)!r})"

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return self.const(1)

    def const(self, c: Coeff) -> "Poly":
        c = _canon(c)
        return Poly(self, {(0,) * self.nvars: c} if c else {})

    def var(self, name: str) -> "Poly":
        exp = [0] * self.nvars
        exp[self._index[name]] = 1
        return Poly(self, {tuple(exp): 1})

    def gens(self) -> list["Poly"]:
        return [self.var(n) for n in self.names]

    def index(self, name: str) -> int:
        return self._index[name]


def _canon(c: Coeff) -> Coeff:
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, int):
        return c
    if isinstance(c, Rational):
        return _canon(Fraction(c.numerator, c.denominator))
    raise TypeError(f"coefficient {c!r} is not exact")


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_div(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


def mono_divides(a: Monomial, b: Monomial) -> bool:
    """True when monomial a divides monomial b."""
    return all(x <= y for x, y in zip(a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


class Poly:
    """Immutable-by-convention sparse polynomial over the rationals."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms: Mapping[Monomial, Coeff]):
        self.ring = ring
        self.terms = {m: c for m, c in terms.items() if c}

    # -- construction helpers
    @classmethod
    def from_terms(cls, ring: Ring, terms: Iterable[tuple[Monomial, Coeff]]) -> "Poly":
        acc: dict[Monomial, Coeff] = {}
        for m, c in terms:
            acc[m] = acc.get(m, 0) + c
        return cls(ring, {m: _canon(c) for m, c in acc.items() if c})

    def _coerce(self, other: object) -> "Poly":
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise ValueError("polynomials live in different rings")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented  # type: ignore[return-value]

    # -- queries
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def leading_monomial(self) -> Monomial:
        return max(self.terms)

    def leading_coefficient(self) -> Coeff:
        return self.terms[max(self.terms)]

    def sorted_terms(self) -> list[tuple[Monomial, Coeff]]:
        return sorted(self.terms.items(), reverse=True)

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def variables_used(self) -> set[int]:
        return {i for m in self.terms for i, e in enumerate(m) if e}

    def is_univariate_in(self, index: int) -> bool:
        return self.variables_used() <= {index}

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def degree_in(self, index: int) -> int:
        return max((m[index] for m in self.terms), default=-1)

    # -- arithmetic
    def __add__(self, other: object) -> "Poly":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        t = dict(self.terms)
        for m, c in o.terms.items():
            v = t.get(m, 0) + c
            if v:
                t[m] = _canon(v)
            else:
                t.pop(m, None)
        return Poly(self.ring, t)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: object) -> "Poly":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> "Poly":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other: object) -> "Poly":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        t: dict[Monomial, Coeff] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = mono_mul(m1, m2)
                t[m] = t.get(m, 0) + c1 * c2
        return Poly(self.ring, {m: _canon(c) for m, c in t.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power")
        out = self.ring.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale(self, c: Coeff) -> "Poly":
        if not c:
            return self.ring.zero()
        return Poly(self.ring, {m: _canon(v * c) for m, v in self.terms.items()})

    def mul_term(self, mono: Monomial, c: Coeff) -> "Poly":
        return Poly(self.ring, {mono_mul(m, mono): _canon(v * c) for m, v in self.terms.items()})

    def monic(self) -> "Poly":
        if not self.terms:
            return self
        lc = self.leading_coefficient()
        return Poly(self.ring, {m: _canon(Fraction(c) / lc) for m, c in self.terms.items()})

    def primitive(self) -> "Poly":
        """Integer coefficients with gcd 1 and positive leading coefficient."""
        if not self.terms:
            return self
        den = 1
        for c in self.terms.values():
            if isinstance(c, Fraction):
                den = lcm(den, c.denominator)
        ints = {m: int(c * den) for m, c in self.terms.items()}
        g = 0
        for v in ints.values():
            g = gcd(g, v)
        if ints[max(ints)] < 0:
            g = -g
        return Poly(self.ring, {m: v // g for m, v in ints.items()})

    def substitute(self, values: Mapping[str, Coeff]) -> "Poly":
        """Substitute exact constants for some variables (the ring is kept)."""
        idx = {self.ring.index(k): v for k, v in values.items()}
        out: dict[Monomial, Coeff] = {}
        for m, c in self.terms.items():
            coeff = c
            mm = list(m)
            for i, v in idx.items():
                if mm[i]:
                    coeff = coeff * v ** mm[i]
                    mm[i] = 0
            key = tuple(mm)
            out[key] = out.get(key, 0) + coeff
        return Poly(self.ring, {m: _canon(c) for m, c in out.items() if c})

    def evaluate(self, point: Sequence[complex]) -> complex:
        total = 0j
        for m, c in self.terms.items():
            v = complex(c)
            for x, e in zip(point, m):
                if e:
                    v *= x ** e
            total += v
        return total

    def univariate_coeffs(self, index: int) -> list[Fraction]:
        """Coefficients (ascending powers) of a polynomial in the single variable ``index``."""
        if not self.is_univariate_in(index):
            raise ValueError("polynomial involves other variables")
        deg = self.degree_in(index)
        out = [Fraction(0)] * (deg + 1)
        for m, c in self.terms.items():
            out[m[index]] = Fraction(c)
        return out

    # -- comparison and display
    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.ring, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"Poly({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = "*".join(
                name if e == 1 else f"{name}^{e}"
                for name, e in zip(self.ring.names, m) if e
            )
            parts.append((c, mono))
        out = ""
        for i, (c, mono) in enumerate(parts):
            neg = c < 0
            a = -c if neg else c
            if mono:
                body = mono if a == 1 else f"{a}*{mono}"
            else:
                body = str(a)
            if i == 0:
                out = ("-" if neg else "") + body
            else:
                out += (" - " if neg else " + ") + body
        return out


def spoly(f: Poly, g: Poly) -> Poly:
    mf, mg = f.leading_monomial(), g.leading_monomial()
    m = mono_lcm(mf, mg)
    cf, cg = f.leading_coefficient(), g.leading_coefficient()
    return f.mul_term(mono_div(m, mf), Fraction(1) / cf) - g.mul_term(mono_div(m, mg), Fraction(1) / cg)


def reduce(f: Poly, basis: Sequence[Poly]) -> Poly:
    """Full normal form of f modulo ``basis`` (multivariate division remainder)."""
    ring = f.ring
    work = dict(f.terms)
    rem: dict[Monomial, Coeff] = {}
    leads = [(g.leading_monomial(), g.leading_coefficient(), g) for g in basis if g]
    while work:
        m = max(work)
        c = work[m]
        for lm, lc, g in leads:
            if mono_divides(lm, m):
                q = mono_div(m, lm)
                factor = Fraction(c) / lc
                for gm, gc in g.terms.items():
                    key = mono_mul(gm, q)
                    v = work.get(key, 0) - factor * gc
                    if v:
                        work[key] = v
                    else:
                        work.pop(key, None)
                break
        else:
            rem[m] = c
            del work[m]
    return Poly(ring, {m: _canon(c) for m, c in rem.items()})
