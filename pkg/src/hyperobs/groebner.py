"""Buchberger's algorithm over Q and the ideal tests built on it.

Internally every polynomial is kept primitive with integer coefficients and
a positive leading coefficient; reduction is fraction-free. Public results
are monic Polynomials with Fraction coefficients.

Pairs are chosen by the normal strategy (smallest lcm first, ties in
creation order) and pruned with the Gebauer-Moeller criteria.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from operator import add, le, sub
from typing import Dict, List, Optional, Sequence, Tuple

from .poly import Exponent, Polynomial, VariableSpaceError

DEFAULT_MAX_REDUCTIONS = 50_000
DEFAULT_MAX_BASIS = 5_000


class GroebnerBudgetExceeded(RuntimeError):
    """Raised when a basis computation exceeds its reduction or size budget."""


@dataclass(frozen=True)
class MonomialOrder:
    """``kind`` is grevlex, grlex, lex or block; block uses ``split`` leading variables."""

    kind: str = "grevlex"
    split: int = 0

    def __post_init__(self):
        if self.kind not in ("grevlex", "grlex", "lex", "block"):
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if self.kind == "block" and self.split < 1:
            raise ValueError("block order needs split >= 1")

    def key(self, e: Exponent) -> tuple:
        """Sort key; a larger key means a larger monomial."""
        if self.kind == "grevlex":
            return (sum(e),) + tuple(-k for k in reversed(e))
        if self.kind == "lex":
            return tuple(e)
        if self.kind == "grlex":
            return (sum(e),) + tuple(e)
        a, b = e[: self.split], e[self.split :]
        return (sum(a),) + tuple(-k for k in reversed(a)) + (sum(b),) + tuple(-k for k in reversed(b))


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


def elimination_order(k: int) -> MonomialOrder:
    """Block order eliminating the first k variables."""
    return MonomialOrder("block", k)


def leading_term(f: Polynomial, order: MonomialOrder = GREVLEX) -> Tuple[Exponent, Fraction]:
    if f.is_zero():
        raise ValueError("zero polynomial has no leading term")
    e = max(f.terms, key=order.key)
    return e, f.terms[e]


# internal machinery -------------------------------------------------------


class _Ctx:
    """Per-computation caches for order keys and support masks."""

    __slots__ = ("order", "nkey", "mask", "steps")

    def __init__(self, order: MonomialOrder):
        self.order = order
        self.nkey: Dict[Exponent, tuple] = {}
        self.mask: Dict[Exponent, int] = {}
        self.steps = 0

    def neg(self, m: Exponent) -> tuple:
        k = self.nkey.get(m)
        if k is None:
            k = tuple(-v for v in self.order.key(m))
            self.nkey[m] = k
        return k

    def msk(self, m: Exponent) -> int:
        b = self.mask.get(m)
        if b is None:
            b = 0
            for i, k in enumerate(m):
                if k:
                    b |= 1 << i
            self.mask[m] = b
        return b


class _IPoly:
    __slots__ = ("terms", "lm", "lc", "mask", "tail")

    def __init__(self, terms: Dict[Exponent, int], ctx: _Ctx):
        items = sorted(terms.items(), key=lambda t: ctx.neg(t[0]))
        self.terms = items
        self.lm, self.lc = items[0]
        self.mask = ctx.msk(self.lm)
        self.tail = items[1:]

    def as_dict(self) -> Dict[Exponent, int]:
        return dict(self.terms)


def _primitive(terms: Dict[Exponent, int], ctx: _Ctx) -> Dict[Exponent, int]:
    g = 0
    for c in terms.values():
        g = gcd(g, c)
        if g == 1:
            break
    lead = min(terms, key=ctx.neg)
    if terms[lead] < 0:
        g = -g
    if g == 1:
        return terms
    return {m: c // g for m, c in terms.items()}


def _to_int_terms(f: Polynomial) -> Dict[Exponent, int]:
    den = 1
    for c in f.terms.values():
        den = den * c.denominator // gcd(den, c.denominator)
    return {e: int(c * den) for e, c in f.terms.items()}


def _divides(a: Exponent, b: Exponent) -> bool:
    return all(map(le, a, b))


def _lcm(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x if x > y else y for x, y in zip(a, b))


def _find_reducer(m: Exponent, mmask: int, basis: Sequence[_IPoly]) -> Optional[_IPoly]:
    for g in basis:
        if g.mask & ~mmask == 0 and _divides(g.lm, m):
            return g
    return None


def _reduce(terms: Dict[Exponent, int], basis: Sequence[_IPoly], ctx: _Ctx, full: bool = True):
    """Fraction-free normal form.

    Returns (remainder, scale) with scale * terms = remainder + combination of
    the basis, scale a positive integer.
    """
    p = dict(terms)
    heap = [(ctx.neg(m), m) for m in p]
    heapq.heapify(heap)
    rem: Dict[Exponent, int] = {}
    scale = 1
    while heap:
        _, m = heapq.heappop(heap)
        c = p.get(m)
        if c is None:
            continue
        g = _find_reducer(m, ctx.msk(m), basis) if (full or not rem) else None
        if g is None:
            rem[m] = c
            del p[m]
            if not full:
                # top reduction only: the rest is copied unchanged
                for m2, c2 in p.items():
                    rem[m2] = c2
                break
            continue
        ctx.steps += 1
        a = g.lc
        d = gcd(a, c)
        ca, cc = a // d, c // d
        if ca < 0:
            ca, cc = -ca, -cc
        if ca != 1:
            scale *= ca
            for k in p:
                p[k] *= ca
            for k in rem:
                rem[k] *= ca
        del p[m]
        q = tuple(map(sub, m, g.lm))
        for gm, gc in g.tail:
            mm = tuple(map(add, gm, q))
            old = p.get(mm)
            if old is None:
                p[mm] = -cc * gc
                heapq.heappush(heap, (ctx.neg(mm), mm))
            else:
                v = old - cc * gc
                if v:
                    p[mm] = v
                else:
                    del p[mm]
    return rem, scale


def _spoly(f: _IPoly, g: _IPoly) -> Dict[Exponent, int]:
    l = _lcm(f.lm, g.lm)
    d = gcd(f.lc, g.lc)
    cf, cg = g.lc // d, f.lc // d
    qf = tuple(map(sub, l, f.lm))
    qg = tuple(map(sub, l, g.lm))
    out: Dict[Exponent, int] = {}
    for m, c in f.tail:
        out[tuple(map(add, m, qf))] = cf * c
    for m, c in g.tail:
        mm = tuple(map(add, m, qg))
        v = out.get(mm, 0) - cg * c
        if v:
            out[mm] = v
        else:
            out.pop(mm, None)
    return out


def _buchberger(polys: List[_IPoly], hint: List[_IPoly], ctx: _Ctx, max_reductions: int, max_basis: int) -> List[_IPoly]:
    allp: List[_IPoly] = []
    active: List[int] = []
    pairs: Dict[Tuple[int, int], Exponent] = {}
    heap: list = []
    counter = 0

    def update(h_idx: int, initial: bool = False):
        nonlocal counter, active
        h = allp[h_idx]
        cand = [(g, _lcm(h.lm, allp[g].lm)) for g in active]
        keep = []
        for pos, (g, l) in enumerate(cand):
            glm = allp[g].lm
            disjoint = all(a == 0 or b == 0 for a, b in zip(h.lm, glm))
            if disjoint:
                keep.append((g, l, True))
                continue
            redundant = False
            for g2, l2 in cand[pos + 1 :]:
                if _divides(l2, l):
                    redundant = True
                    break
            if not redundant:
                for g2, l2, _ in keep:
                    if _divides(l2, l):
                        redundant = True
                        break
            if not redundant:
                keep.append((g, l, False))
        # old pairs made superfluous by the new leading monomial
        for key in list(pairs):
            l = pairs[key]
            i, j = key
            if _divides(h.lm, l) and _lcm(allp[i].lm, h.lm) != l and _lcm(allp[j].lm, h.lm) != l:
                del pairs[key]
        if not initial:
            for g, l, disjoint in keep:
                if disjoint:
                    continue
                key = (g, h_idx)
                pairs[key] = l
                counter += 1
                heapq.heappush(heap, (ctx.order.key(l), counter, key))
        active = [g for g in active if not _divides(h.lm, allp[g].lm)] + [h_idx]

    for g in hint:
        allp.append(g)
        update(len(allp) - 1, initial=True)
    for f in polys:
        rem, _ = _reduce(f.as_dict(), [allp[i] for i in active], ctx)
        if not rem:
            continue
        allp.append(_IPoly(_primitive(rem, ctx), ctx))
        update(len(allp) - 1)

    done = 0
    while heap:
        _, _, key = heapq.heappop(heap)
        if key not in pairs:
            continue
        del pairs[key]
        i, j = key
        done += 1
        if done > max_reductions:
            raise GroebnerBudgetExceeded(f"more than {max_reductions} S-polynomial reductions")
        s = _spoly(allp[i], allp[j])
        if not s:
            continue
        rem, _ = _reduce(s, [allp[k] for k in active], ctx)
        if not rem:
            continue
        allp.append(_IPoly(_primitive(rem, ctx), ctx))
        if len(active) >= max_basis:
            raise GroebnerBudgetExceeded(f"basis grew beyond {max_basis} elements")
        update(len(allp) - 1)
    return [allp[i] for i in active]


def _interreduce(G: List[_IPoly], ctx: _Ctx) -> List[_IPoly]:
    G = sorted(G, key=lambda g: ctx.neg(g.lm))
    out = []
    for i, g in enumerate(G):
        others = G[:i] + G[i + 1 :]
        # leading term is irreducible in a minimal basis; reduce the tail only
        rem, scale = _reduce(dict(g.tail), others, ctx) if g.tail else ({}, 1)
        rem[g.lm] = g.lc * scale
        out.append(_IPoly(_primitive(rem, ctx), ctx))
    return out


def _to_poly(g: _IPoly, vars) -> Polynomial:
    lc = g.lc
    return Polynomial({m: Fraction(c, lc) for m, c in g.terms}, vars)


def _check_space(polys: Sequence[Polynomial]):
    vs = {p.vars for p in polys}
    if len(vs) > 1:
        raise VariableSpaceError("generators live in different variable spaces")
    return next(iter(vs)) if vs else ()


# public API ---------------------------------------------------------------


def groebner_basis(
    gens: Sequence[Polynomial],
    order: MonomialOrder = GREVLEX,
    max_reductions: int = DEFAULT_MAX_REDUCTIONS,
    max_basis: int = DEFAULT_MAX_BASIS,
    known_basis: Sequence[Polynomial] = (),
    vars: Sequence[str] | None = None,
) -> List[Polynomial]:
    """Reduced Groebner basis, monic and sorted by increasing leading monomial.

    ``known_basis`` may hold a Groebner basis (same order) of part of the
    ideal; its internal S-pairs are then skipped.
    """
    space = _check_space(list(gens) + list(known_basis))
    if vars is not None:
        space = tuple(vars)
    ctx = _Ctx(order)
    hint = [_IPoly(_primitive(_to_int_terms(g), ctx), ctx) for g in known_basis if not g.is_zero()]
    polys = [_IPoly(_primitive(_to_int_terms(g), ctx), ctx) for g in gens if not g.is_zero()]
    polys.sort(key=lambda p: ctx.neg(p.lm), reverse=True)
    for p in polys + hint:
        if not any(p.lm):
            return [Polynomial.constant(1, space)]
    G = _buchberger(polys, hint, ctx, max_reductions, max_basis)
    if any(not any(g.lm) for g in G):
        return [Polynomial.constant(1, space)]
    G = _interreduce(G, ctx)
    G.sort(key=lambda g: order.key(g.lm))
    return [_to_poly(g, space) for g in G]


def reduce(f: Polynomial, G: Sequence[Polynomial], order: MonomialOrder = GREVLEX) -> Polynomial:
    """Remainder of f on division by G; no remainder term is divisible by any LT(G)."""
    if f.is_zero():
        return f
    _check_space([f] + list(G))
    ctx = _Ctx(order)
    basis = [_IPoly(_to_int_terms(g), ctx) for g in G if not g.is_zero()]
    den = 1
    for c in f.terms.values():
        den = den * c.denominator // gcd(den, c.denominator)
    rem, scale = _reduce(_to_int_terms(f), basis, ctx)
    return Polynomial({m: Fraction(c, scale * den) for m, c in rem.items()}, f.vars)


def s_polynomial(f: Polynomial, g: Polynomial, order: MonomialOrder = GREVLEX) -> Polynomial:
    ef, cf = leading_term(f, order)
    eg, cg = leading_term(g, order)
    l = _lcm(ef, eg)
    return f.mul_term(tuple(map(sub, l, ef)), 1 / cf) - g.mul_term(tuple(map(sub, l, eg)), 1 / cg)


def is_groebner_basis(G: Sequence[Polynomial], order: MonomialOrder = GREVLEX) -> bool:
    """Buchberger's criterion: every S-polynomial reduces to zero."""
    G = [g for g in G if not g.is_zero()]
    for i in range(len(G)):
        for j in range(i + 1, len(G)):
            if not reduce(s_polynomial(G[i], G[j], order), G, order).is_zero():
                return False
    return True


def is_reduced_basis(G: Sequence[Polynomial], order: MonomialOrder = GREVLEX) -> bool:
    lts = [leading_term(g, order) for g in G]
    if any(c != 1 for _, c in lts):
        return False
    for g in G:
        for m in g.terms:
            for h, (e, _) in zip(G, lts):
                if h is not g and _divides(e, m):
                    return False
    return True


@dataclass
class Ideal:
    """An ideal with its generators, monomial order and cached reduced basis."""

    generators: Tuple[Polynomial, ...]
    vars: Tuple[str, ...]
    order: MonomialOrder = GREVLEX
    max_reductions: int = DEFAULT_MAX_REDUCTIONS
    _basis: Optional[List[Polynomial]] = field(default=None, repr=False)

    @classmethod
    def of(cls, gens: Sequence[Polynomial], vars: Sequence[str] | None = None, order: MonomialOrder = GREVLEX,
           max_reductions: int = DEFAULT_MAX_REDUCTIONS, known_basis: Sequence[Polynomial] = ()) -> "Ideal":
        if vars is None:
            if not gens:
                raise ValueError("cannot infer the variable space of an empty generator list")
            vars = gens[0].vars
        gens = tuple(g for g in gens if not g.is_zero())
        I = cls(gens, tuple(vars), order, max_reductions)
        if known_basis is not None and len(known_basis):
            I._basis = groebner_basis(gens, order, max_reductions, known_basis=known_basis, vars=vars)
        return I

    @property
    def basis(self) -> List[Polynomial]:
        if self._basis is None:
            self._basis = groebner_basis(self.generators, self.order, self.max_reductions, vars=self.vars) if self.generators else []
        return self._basis

    def contains(self, f: Polynomial) -> bool:
        return reduce(f, self.basis, self.order).is_zero() if self.basis else f.is_zero()

    def is_unit(self) -> bool:
        return any(g.is_constant() for g in self.basis)

    def radical_contains(self, f: Polynomial) -> bool:
        return radical_membership(f, self)


def ideal_membership(f: Polynomial, I: Ideal) -> bool:
    return I.contains(f)


def ideal_equal(I1: Ideal, I2: Ideal) -> bool:
    """Mutual inclusion of generators."""
    return all(I2.contains(g) for g in I1.generators) and all(I1.contains(g) for g in I2.generators)


def _fresh_name(vars: Sequence[str], base: str = "t") -> str:
    name = base
    while name in vars:
        name += "_"
    return name


def radical_membership(f: Polynomial, I: Ideal) -> bool:
    """f in sqrt(I) iff 1 in I + <1 - t f> with a fresh variable t placed last."""
    if f.is_zero():
        return True
    if I.contains(f):
        return True
    t = _fresh_name(I.vars)
    space = I.vars + (t,)
    gens = [g.embed(space) for g in (I.basis or I.generators)]
    gens.append(Polynomial.constant(1, space) - Polynomial.variable(t, space) * f.embed(space))
    G = groebner_basis(gens, I.order, I.max_reductions, vars=space)
    return any(g.is_constant() for g in G)


def quotient_is_unit_ideal(I: Ideal, ell: Sequence[Polynomial]) -> bool:
    """True when every generator of ell lies in sqrt(I), i.e. V(I) is inside V(ell)."""
    return all(radical_membership(g, I) for g in ell)
