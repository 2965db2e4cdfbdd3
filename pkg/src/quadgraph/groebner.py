"""Buchberger's algorithm over the rationals.

Pair selection uses the normal strategy (smallest lcm of leading monomials first)
and pairs are pruned with Buchberger's two criteria (coprime leading monomials,
and the chain criterion), installed as in Gebauer and Moeller's update.  Arithmetic inside the algorithm is fraction-free:
polynomials are kept as primitive integer dicts.

Three monomial orders are offered.  ``lex`` is the pure lexicographic order.
``grevlex`` is the graded reverse lexicographic order.  ``elim`` compares the
last variable only after all the others (graded reverse lex on the others),
which is an elimination order for the last variable.
"""

from __future__ import annotations

import heapq
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from operator import add, le, sub

from quadgraph.poly import Monomial, Poly
from quadgraph.poly import reduce as _reduce_fraction
from quadgraph.poly import spoly as _spoly_fraction

_IPoly = dict


def _lex_desc(m: Monomial) -> tuple:
    return tuple(-e for e in m)


def _grevlex_desc(m: Monomial) -> tuple:
    return (-sum(m),) + m[::-1]


def _elim_desc(m: Monomial) -> tuple:
    head = m[:-1]
    return (-sum(head),) + head[::-1] + (-m[-1],)


@dataclass(frozen=True)
class MonomialOrder:
    """A monomial order given by a key that sorts larger monomials first."""

    name: str
    desc: Callable[[Monomial], tuple]

    def leading(self, terms) -> Monomial:
        return min(terms, key=self.desc)

    def sort_key(self, m: Monomial) -> tuple:
        """Ascending key (smaller monomials first)."""
        return tuple(-x for x in self.desc(m))


ORDERS = {
    "lex": MonomialOrder("lex", _lex_desc),
    "grevlex": MonomialOrder("grevlex", _grevlex_desc),
    "elim": MonomialOrder("elim", _elim_desc),
}


def get_order(order: str | MonomialOrder) -> MonomialOrder:
    if isinstance(order, MonomialOrder):
        return order
    try:
        return ORDERS[order]
    except KeyError:
        raise ValueError(f"unknown monomial order {order!r}") from None


def _mmul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(map(add, a, b))


def _mdiv(a: Monomial, b: Monomial) -> Monomial:
    return tuple(map(sub, a, b))


def _mdivides(a: Monomial, b: Monomial) -> bool:
    return all(map(le, a, b))


def _mlcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(map(max, a, b))


class _Engine:
    def __init__(self, order: MonomialOrder):
        self.order = order
        self.desc = order.desc

    def primitive(self, t: _IPoly) -> _IPoly:
        if not t:
            return t
        g = 0
        for v in t.values():
            g = gcd(g, v)
            if g == 1:
                break
        if t[self.order.leading(t)] < 0:
            g = -g
        if g == 1:
            return t
        return {m: v // g for m, v in t.items()}

    def reduce(self, f: _IPoly, reducers: Sequence[tuple[Monomial, int, _IPoly]]) -> _IPoly:
        """Fraction-free full normal form of f, returned primitive."""
        desc = self.desc
        work = dict(f)
        heap = [(desc(m), m) for m in work]
        heapq.heapify(heap)
        rem: dict[Monomial, int] = {}
        steps = 0
        while heap:
            _, m = heapq.heappop(heap)
            c = work.get(m)
            if not c:
                continue
            for lm, lc, g in reducers:
                if _mdivides(lm, m):
                    q = _mdiv(m, lm)
                    d = gcd(c, lc)
                    mul_w, mul_g = lc // d, c // d
                    if mul_w < 0:
                        mul_w, mul_g = -mul_w, -mul_g
                    if mul_w != 1:
                        for k in work:
                            work[k] *= mul_w
                        for k in rem:
                            rem[k] *= mul_w
                    for gm, gc in g.items():
                        km = _mmul(gm, q)
                        v = work.get(km, 0) - mul_g * gc
                        if v:
                            if km not in work:
                                heapq.heappush(heap, (desc(km), km))
                            work[km] = v
                        else:
                            work.pop(km, None)
                    steps += 1
                    if steps % 8 == 0:
                        _shrink(work, rem)
                    break
            else:
                rem[m] = c
                del work[m]
        out = {m: v for m, v in rem.items() if v}
        return self.primitive(out)

    def spoly(self, f: _IPoly, lf: Monomial, g: _IPoly, lg: Monomial) -> _IPoly:
        cf, cg = f[lf], g[lg]
        m = _mlcm(lf, lg)
        qf, qg = _mdiv(m, lf), _mdiv(m, lg)
        d = gcd(cf, cg)
        af, ag = cg // d, cf // d
        out: dict[Monomial, int] = {}
        for k, v in f.items():
            out[_mmul(k, qf)] = af * v
        for k, v in g.items():
            km = _mmul(k, qg)
            nv = out.get(km, 0) - ag * v
            if nv:
                out[km] = nv
            else:
                out.pop(km, None)
        return out


def _shrink(work: dict, rem: dict) -> None:
    g = 0
    for v in work.values():
        g = gcd(g, v)
        if g == 1:
            return
    for v in rem.values():
        g = gcd(g, v)
        if g == 1:
            return
    if g > 1:
        for k in work:
            work[k] //= g
        for k in rem:
            rem[k] //= g


def _is_unit(t: _IPoly) -> bool:
    return len(t) == 1 and not any(next(iter(t)))


def buchberger(generators: Sequence[Poly], order: str | MonomialOrder = "lex",
               progress: Callable[[int, int], None] | None = None) -> list[Poly]:
    """Reduced Groebner basis of the ideal spanned by ``generators``.

    The result is monic and sorted by increasing leading monomial in ``order``.
    The unit ideal returns ``[1]`` as soon as a non-zero constant appears.
    """
    gens = [g for g in generators if g]
    if not gens:
        raise ValueError("need at least one non-zero generator")
    ring = gens[0].ring
    if any(g.ring != ring for g in gens):
        raise ValueError("generators live in different rings")
    mo = get_order(order)
    eng = _Engine(mo)

    G: list[_IPoly] = []
    leads: list[Monomial] = []
    current: set[int] = set()  # indices forming the working basis
    pairs: set[tuple[int, int]] = set()
    queue: list[tuple[tuple, int, int]] = []

    def reducers() -> list[tuple[Monomial, int, _IPoly]]:
        return [(leads[i], G[i][leads[i]], G[i]) for i in sorted(current)]

    def update(h: _IPoly) -> bool:
        """Add h to the basis, installing both criteria in the Gebauer-Moeller way."""
        if _is_unit(h):
            return True
        mh = mo.leading(h)
        ih = len(G)
        G.append(h)
        leads.append(mh)
        # new pairs (h, g): keep a pair unless its lcm is a proper multiple of
        # another new pair's lcm (chain criterion); coprime pairs are kept here
        # so that they can shadow others, and dropped afterwards (first criterion)
        cand = sorted(current)
        kept: list[int] = []
        for pos, ig in enumerate(cand):
            lcm_hg = _mlcm(mh, leads[ig])
            if _mmul(mh, leads[ig]) == lcm_hg:
                kept.append(ig)
                continue
            others = cand[pos + 1:] + kept
            if any(_mdivides(_mlcm(mh, leads[ip]), lcm_hg) for ip in others):
                continue
            kept.append(ig)
        new_pairs = [
            ig for ig in kept if _mmul(mh, leads[ig]) != _mlcm(mh, leads[ig])
        ]
        # old pairs whose lcm is a multiple of LM(h) are redundant unless the lcm
        # coincides with one of the lcms involving h
        for a, b in list(pairs):
            lab = _mlcm(leads[a], leads[b])
            if (_mdivides(mh, lab) and _mlcm(leads[a], mh) != lab
                    and _mlcm(leads[b], mh) != lab):
                pairs.discard((a, b))
        for ig in new_pairs:
            pairs.add((ig, ih))
            heapq.heappush(queue, (mo.sort_key(_mlcm(leads[ig], mh)), ig, ih))
        for ig in list(current):
            if _mdivides(mh, leads[ig]):
                current.discard(ig)
        current.add(ih)
        return False

    # interreduce the input first so that the working basis starts small
    for g in gens:
        h = eng.reduce(dict(g.primitive().terms), reducers())
        if h and update(h):
            return [ring.one()]

    done = 0
    while queue:
        _, i, j = heapq.heappop(queue)
        if (i, j) not in pairs:
            continue
        pairs.discard((i, j))
        s = eng.spoly(G[i], leads[i], G[j], leads[j])
        if not s:
            continue
        h = eng.reduce(s, reducers())
        done += 1
        if progress is not None:
            progress(done, len(pairs))
        if h and update(h):
            return [ring.one()]

    # minimal basis
    keep = [
        i for i in sorted(current)
        if not any(j != i and _mdivides(leads[j], leads[i]) for j in current)
    ]
    out: list[Poly] = []
    for i in keep:
        others = [(leads[j], G[j][leads[j]], G[j]) for j in keep if j != i]
        # the leading monomial of a minimal basis element is divisible by no other
        # leading monomial, so a full reduction only rewrites the tail
        red = eng.reduce(G[i], others)
        lc = red[leads[i]]
        out.append(Poly(ring, {m: Fraction(c, lc) for m, c in red.items()}).scale(1))
    out.sort(key=lambda p: mo.sort_key(mo.leading(p.terms)))
    return out


def leading_monomial(p: Poly, order: str | MonomialOrder = "lex") -> Monomial:
    return get_order(order).leading(p.terms)


def normal_form(f: Poly, basis: Sequence[Poly]) -> Poly:
    """Remainder of f on division by ``basis`` in the lex order (exact rationals)."""
    return _reduce_fraction(f, basis)


def spoly(f: Poly, g: Poly) -> Poly:
    return _spoly_fraction(f, g)


def is_groebner(basis: Sequence[Poly]) -> bool:
    """Check Buchberger's S-pair criterion on a candidate lex basis."""
    for a in range(len(basis)):
        for b in range(a + 1, len(basis)):
            if normal_form(spoly(basis[a], basis[b]), basis):
                return False
    return True


def is_unit_ideal(generators: Sequence[Poly]) -> bool:
    """Decide 1 in the ideal using a graded order, which is usually much faster."""
    basis = buchberger(generators, order="grevlex")
    return len(basis) == 1 and basis[0].is_constant()
