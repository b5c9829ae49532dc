"""Global observability through the chain of pair ideals.

For outputs h and vector fields g_0 = f (drift), g_1.. (input fields) the
ideal J_r is generated by L_w h(xi) - L_w h(eta) over all words w of length
at most r. Once J_N = J_{N+1}, J_N is closed under every L_{g_j} acting on
both copies, so the chain is stable from there on. Fixing eta = sigma gives
the ideal whose variety is the set of initial states indistinguishable from
sigma; observability at sigma means that set is {sigma}.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .groebner import (
    DEFAULT_MAX_REDUCTIONS,
    GroebnerBudgetExceeded,
    Ideal,
    groebner_basis,
    quotient_is_unit_ideal,
    reduce,
)
from .poly import Polynomial, lie_derivative, pair_vars, state_vars, to_xi_eta
from .system import HypergraphSystem, lower_direct, lower_dynamics, lower_input_fields, lower_outputs, tensor_form
from .tensor import SparseTensor, circ_contract, slot_contract, symmetrize

DEFAULT_WORD_CAP = 4096


class Verdict(str, enum.Enum):
    OBSERVABLE = "Observable"
    UNOBSERVABLE = "Unobservable"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class LieGenerator:
    output: int  # 1-based output index; direct terms are tagged separately
    word: Tuple[int, ...]  # field indices applied first to last, 0 is the drift
    poly: Polynomial
    kind: str = "output"


def default_r_cap(sys: HypergraphSystem) -> int:
    return max(sys.n * max(sys.q, 1), 6)


def _output_functions(sys: HypergraphSystem) -> List[Tuple[int, str, Polynomial]]:
    xs = state_vars(sys.n)
    outs = [(i + 1, "output", h) for i, h in enumerate(lower_outputs(sys, xs))]
    # y_i = h_i + sum_l d_il u_l; with inputs free, each d_il is seen on its own
    for (i, l), d in sorted(lower_direct(sys, xs).items()):
        outs.append((i, f"direct u{l}", d))
    return outs


def enumerate_lie_generators(sys: HypergraphSystem, r_max: int, word_cap: int = DEFAULT_WORD_CAP) -> Tuple[List[List[LieGenerator]], bool]:
    """Lie-word generators grouped by word length 0..r_max.

    Returns (levels, truncated); truncated is set when some level hit
    ``word_cap`` and was cut short.
    """
    xs = state_vars(sys.n)
    fields = _fields(sys, xs)
    level = [LieGenerator(i, (), h, kind) for i, kind, h in _output_functions(sys)]
    levels = [level]
    truncated = False
    for _ in range(r_max):
        level, cut = _next_level(level, fields, xs, word_cap)
        truncated |= cut
        levels.append(level)
    return levels, truncated


def _fields(sys: HypergraphSystem, xs) -> List[Tuple[int, List[Polynomial]]]:
    fields = [lower_dynamics(sys, xs)] + lower_input_fields(sys, xs)
    return [(j, g) for j, g in enumerate(fields) if any(not p.is_zero() for p in g)]


def _next_level(level: List[LieGenerator], fields, xs, word_cap: int) -> Tuple[List[LieGenerator], bool]:
    nxt = []
    for gen in level:
        if gen.poly.is_zero():
            continue
        for j, g in fields:
            if len(nxt) >= word_cap:
                return nxt, True
            nxt.append(LieGenerator(gen.output, gen.word + (j,), lie_derivative(gen.poly, g, xs), gen.kind))
    return nxt, False


def pair_generator(p: Polynomial, n: int) -> Polynomial:
    a, b = to_xi_eta(p, n)
    return a - b


@dataclass
class IdealChain:
    """Pair ideals J_0 c J_1 c ... with their reduced bases.

    ``N`` is the smallest index N >= 1 with J_N = J_{N+1} (at least one Lie
    level is always examined). ``stabilized`` is False when r_cap was hit.
    """

    n: int
    levels: List[List[LieGenerator]]
    level_generators: List[List[Polynomial]]
    bases: List[List[Polynomial]]
    N: int
    stabilized: bool
    truncated: bool = False
    equal_steps: List[bool] = field(default_factory=list)

    @property
    def vars(self) -> Tuple[str, ...]:
        return pair_vars(self.n)

    def generators(self, r: Optional[int] = None) -> List[Polynomial]:
        r = self.N if r is None else r
        return [g for lvl in self.level_generators[: r + 1] for g in lvl]

    def ideal(self, r: Optional[int] = None) -> Ideal:
        r = self.N if r is None else r
        I = Ideal(tuple(self.generators(r)), self.vars)
        I._basis = self.bases[r]
        return I

    @property
    def J(self) -> Ideal:
        return self.ideal(self.N)


def build_chain(
    sys: HypergraphSystem,
    r_cap: Optional[int] = None,
    two_step: bool = False,
    max_reductions: int = DEFAULT_MAX_REDUCTIONS,
    word_cap: int = DEFAULT_WORD_CAP,
) -> IdealChain:
    """Grow the chain until J_N = J_{N+1} (or two equal steps) or r_cap.

    Raises GroebnerBudgetExceeded when a basis computation runs out of budget.
    """
    if sys.q == 0:
        raise ValueError("system has no outputs")
    r_cap = default_r_cap(sys) if r_cap is None else r_cap
    if r_cap < 1:
        raise ValueError("r_cap must be at least 1")
    n = sys.n
    pv = pair_vars(n)
    xs = state_vars(n)
    fields = _fields(sys, xs)

    level = [LieGenerator(i, (), h, kind) for i, kind, h in _output_functions(sys)]
    levels = [level]
    lvl_gens = [_dedupe([pair_generator(g.poly, n) for g in level])]
    bases = [groebner_basis(lvl_gens[0], max_reductions=max_reductions, vars=pv) if lvl_gens[0] else []]
    equal_steps: List[bool] = []
    truncated = False
    N, stabilized = r_cap, False
    need = 2 if two_step else 1
    run = 0
    for r in range(1, r_cap + 2):
        level, cut = _next_level(level, fields, xs, word_cap)
        truncated |= cut
        levels.append(level)
        new = _dedupe([pair_generator(g.poly, n) for g in level])
        lvl_gens.append(new)
        G = bases[-1]
        equal = all(reduce(g, G).is_zero() for g in new) if G else not new
        equal_steps.append(equal)
        bases.append(G if equal else groebner_basis(new, max_reductions=max_reductions, known_basis=G, vars=pv))
        run = run + 1 if equal else 0
        # J_{r-1} = J_r; N counts from 1 so J_0 = J_1 alone is not enough
        if equal and r - need >= 1 and run >= need:
            N = r - need
            stabilized = True
            break
        if r - 1 >= r_cap:
            break
    if not stabilized:
        N = min(r_cap, len(bases) - 1)
    return IdealChain(n, levels, lvl_gens, bases, N, stabilized, truncated, equal_steps)


def _dedupe(polys: Sequence[Polynomial]) -> List[Polynomial]:
    seen = set()
    out = []
    for p in polys:
        if p.is_zero():
            continue
        key = _monic_key(p)
        if key not in seen:
            seen.add(key)
            out.append(p)
    return out


def _monic_key(p: Polynomial):
    lead = max(p.terms)
    c = p.terms[lead]
    return frozenset((e, v / c) for e, v in p.terms.items())


# substitution eta := sigma ------------------------------------------------


def xi_vars(n: int) -> Tuple[str, ...]:
    return state_vars(n, "xi")


def substitute_initial(gens: Sequence[Polynomial], sigma: Sequence, n: int) -> Ideal:
    """Image of the pair ideal under eta := sigma, as an ideal in xi only."""
    sigma = [Fraction(s) for s in sigma]
    if len(sigma) != n:
        raise ValueError(f"sigma has {len(sigma)} entries, expected {n}")
    xv = xi_vars(n)
    sub = {f"eta{i}": s for i, s in enumerate(sigma, start=1)}
    out = []
    for g in gens:
        h = g.substitute(sub)
        # drop the eta coordinates, all exponents there are now zero
        h = Polynomial({e[:n]: c for e, c in h.terms.items()}, xv)
        if not h.is_zero():
            out.append(h)
    return Ideal(tuple(_dedupe(out)), xv)


def maximal_ideal(sigma: Sequence, n: int) -> List[Polynomial]:
    xv = xi_vars(n)
    return [Polynomial.variable(v, xv) - Fraction(s) for v, s in zip(xv, sigma)]


# real augmentation -------------------------------------------------------


def _even_square_roots(g: Polynomial) -> Optional[List[Polynomial]]:
    """Monomial roots when g = sum c_a m_a^2 with all c_a of one sign."""
    if len(g.terms) < 1:
        return None
    signs = {c > 0 for c in g.terms.values()}
    if len(signs) != 1:
        return None
    roots = []
    for e in g.terms:
        if any(k % 2 for k in e):
            return None
        roots.append(Polynomial.monomial(tuple(k // 2 for k in e), g.vars))
    return roots


def _quadratic_square_forms(g: Polynomial) -> Optional[List[Polynomial]]:
    """Linear forms l_k with g = sum d_k l_k^2, d_k > 0, for semidefinite quadratics."""
    if g.total_degree() != 2:
        return None
    nv = len(g.vars)
    N = nv + 1  # last coordinate is the constant 1
    Q = [[Fraction(0)] * N for _ in range(N)]
    for e, c in g.terms.items():
        idx = [i for i, k in enumerate(e) for _ in range(k)]
        if len(idx) == 2:
            i, j = idx
        elif len(idx) == 1:
            i, j = idx[0], nv
        else:
            i = j = nv
        if i == j:
            Q[i][i] += c
        else:
            Q[i][j] += c / 2
            Q[j][i] += c / 2
    for sign in (1, -1):
        M = [[sign * v for v in row] for row in Q]
        forms = _ldl_forms(M)
        if forms is not None:
            out = []
            for l in forms:
                terms = {}
                for i, v in enumerate(l[:nv]):
                    if v:
                        e = [0] * nv
                        e[i] = 1
                        terms[tuple(e)] = v
                if l[nv]:
                    terms[(0,) * nv] = l[nv]
                out.append(Polynomial(terms, g.vars))
            return out
    return None


def _ldl_forms(M) -> Optional[List[List[Fraction]]]:
    N = len(M)
    M = [row[:] for row in M]
    forms = []
    for k in range(N):
        piv = M[k][k]
        if piv < 0:
            return None
        if piv == 0:
            if any(M[k][j] for j in range(k + 1, N)):
                return None
            continue
        forms.append([Fraction(0)] * k + [M[k][j] / piv for j in range(k, N)])
        for i in range(k + 1, N):
            if M[i][k]:
                f = M[i][k] / piv
                for j in range(k + 1, N):
                    M[i][j] -= f * M[k][j]
    return forms


def real_square_bases(g: Polynomial) -> Optional[List[Polynomial]]:
    """Bases b_k with g = 0 over the reals iff every b_k = 0, when found syntactically."""
    roots = _even_square_roots(g)
    if roots is None:
        roots = _quadratic_square_forms(g)
    if roots is None or (len(roots) == 1 and _monic_key(roots[0]) == _monic_key(g)):
        return None
    return roots


def sos_real_augment(I: Ideal, rounds: int = 4) -> Tuple[Ideal, List[Polynomial]]:
    """Add the square bases of any generator or basis element that is a sum of squares.

    Sound over the reals: the real variety is unchanged.
    """
    gens = list(I.generators)
    added: List[Polynomial] = []
    current = I
    for _ in range(rounds):
        fresh = []
        for g in list(current.generators) + list(current.basis):
            bases = real_square_bases(g)
            if not bases:
                continue
            for b in bases:
                if b.is_zero() or current.contains(b):
                    continue
                if all(_monic_key(b) != _monic_key(a) for a in added + fresh):
                    fresh.append(b)
        if not fresh:
            break
        added.extend(fresh)
        current = Ideal(tuple(_dedupe(gens + added)), I.vars, I.order, I.max_reductions)
    return current, added


# counterexample search ---------------------------------------------------


def _small_rationals(bound: int = 2, max_den: int = 4) -> List[Fraction]:
    vals = {Fraction(p, q) for q in range(1, max_den + 1) for p in range(-bound * q, bound * q + 1)}
    return sorted(vals, key=lambda v: (v.denominator, abs(v), v < 0))


class _Evaluator:
    """Vectorised float screening followed by exact checks."""

    def __init__(self, gens: Sequence[Polynomial]):
        self.gens = list(gens)
        self.compiled = []
        for g in self.gens:
            E = np.array(list(g.terms.keys()), dtype=float).reshape(len(g.terms), len(g.vars))
            c = np.array([float(v) for v in g.terms.values()])
            scale = float(np.abs(c).sum()) or 1.0
            self.compiled.append((E, c, scale))

    def screen(self, pts: np.ndarray) -> np.ndarray:
        ok = np.ones(len(pts), dtype=bool)
        for E, c, scale in self.compiled:
            vals = np.prod(pts[:, None, :] ** E[None, :, :], axis=2) @ c
            mag = np.prod(np.maximum(np.abs(pts[:, None, :]), 1.0) ** E[None, :, :], axis=2) @ np.abs(c)
            ok &= np.abs(vals) <= 1e-9 * (mag + scale)
            if not ok.any():
                break
        return ok

    def exact(self, w: Sequence[Fraction]) -> bool:
        return all(g.evaluate(w) == 0 for g in self.gens)


def _perturbation_candidates(sigma: List[Fraction]) -> Iterator[List[Fraction]]:
    n = len(sigma)
    deltas = [Fraction(d) for d in (1, -1, 2, -2)] + [Fraction(1, 2), Fraction(-1, 2)]
    for i in range(n):
        for d in deltas:
            w = sigma[:]
            w[i] += d
            yield w
        for v in (Fraction(0), -sigma[i]):
            w = sigma[:]
            w[i] = v
            yield w
    for t in (Fraction(-1), Fraction(2), Fraction(1, 2), Fraction(-2), Fraction(3), Fraction(1, 3)):
        yield [t * s for s in sigma]
    if n <= 6:
        for perm in itertools.permutations(range(n)):
            yield [sigma[p] for p in perm]
        for signs in itertools.product((1, -1), repeat=n):
            yield [s * v for s, v in zip(signs, sigma)]
    # one-parameter scalings of coordinate pairs that keep products fixed
    for i, j in itertools.combinations(range(n), 2):
        for t in (Fraction(2), Fraction(1, 2), Fraction(-1)):
            w = sigma[:]
            w[i] *= t
            w[j] /= t
            yield w


def _grid_candidates(sigma: List[Fraction], values: List[Fraction], cap: int) -> Iterator[List[List[Fraction]]]:
    """Batches of grid points; full product when small, else changes in at most two coordinates."""
    n = len(sigma)
    if len(values) ** n <= cap:
        batch = []
        for w in itertools.product(values, repeat=n):
            batch.append(list(w))
            if len(batch) >= 4096:
                yield batch
                batch = []
        if batch:
            yield batch
        return
    for k in (1, 2):
        batch = []
        for pos in itertools.combinations(range(n), k):
            for vals in itertools.product(values, repeat=k):
                w = sigma[:]
                for p, v in zip(pos, vals):
                    w[p] = v
                batch.append(w)
                if len(batch) >= 4096:
                    yield batch
                    batch = []
        if batch:
            yield batch


def _rational_roots(coeffs: List[Fraction], limit: int = 10**6) -> List[Fraction]:
    """Rational roots of sum coeffs[k] t^k via the rational root test."""
    den = 1
    for c in coeffs:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    roots = []
    while ints and ints[0] == 0:
        roots.append(Fraction(0))
        ints = ints[1:]
    while ints and ints[-1] == 0:
        ints.pop()
    if len(ints) <= 1:
        return roots
    a0, an = abs(ints[0]), abs(ints[-1])
    if a0 > limit or an > limit:
        return roots
    ps = [d for d in range(1, a0 + 1) if a0 % d == 0] if a0 <= 10**4 else _divisors(a0)
    qs = [d for d in range(1, an + 1) if an % d == 0] if an <= 10**4 else _divisors(an)
    seen = set()
    for p in ps:
        for q in qs:
            for r in (Fraction(p, q), Fraction(-p, q)):
                if r in seen:
                    continue
                seen.add(r)
                v = 0
                for c in reversed(ints):
                    v = v * r + c
                if v == 0:
                    roots.append(r)
    return roots


def _divisors(a: int) -> List[int]:
    small = [d for d in range(1, int(a**0.5) + 1) if a % d == 0]
    return sorted(set(small + [a // d for d in small]))


def _propagation_search(gens: Sequence[Polynomial], sigma: List[Fraction], node_cap: int = 2000) -> Iterator[List[Fraction]]:
    """Fix free coordinates near sigma and solve generators that become univariate."""
    n = len(sigma)
    xv = gens[0].vars if gens else ()
    nodes = [0]

    def solve(assign: Dict[int, Fraction]) -> Iterator[Dict[int, Fraction]]:
        nodes[0] += 1
        if nodes[0] > node_cap:
            return
        assign = dict(assign)
        while True:
            progress = False
            for g in gens:
                sub = {xv[i]: v for i, v in assign.items()}
                h = g.substitute(sub) if sub else g
                if h.is_zero():
                    continue
                free = [i for i in range(n) if h.degree_in(xv[i]) > 0]
                if not free:
                    return  # nonzero constant, dead branch
                if len(free) == 1:
                    i = free[0]
                    deg = h.degree_in(xv[i])
                    coeffs = [Fraction(0)] * (deg + 1)
                    for e, c in h.terms.items():
                        coeffs[e[i]] += c
                    roots = _rational_roots(coeffs)
                    if not roots:
                        return
                    if len(roots) == 1:
                        assign[i] = roots[0]
                        progress = True
                        break
                    roots.sort(key=lambda r: (r == sigma[i], abs(r - sigma[i])))
                    for r in roots:
                        yield from solve({**assign, i: r})
                    return
            if not progress:
                break
        free = [i for i in range(n) if i not in assign]
        if not free:
            yield assign
            return
        i = free[-1]
        for v in (sigma[i] + 1, sigma[i] - 1, sigma[i], Fraction(0), sigma[i] + 2, sigma[i] * 2, -sigma[i], Fraction(1, 2)):
            yield from solve({**assign, i: v})

    for a in solve({}):
        yield [a[i] for i in range(n)]


def find_counterexample(
    J_sigma: Ideal,
    sigma: Sequence,
    grid_bound: int = 2,
    grid_den: int = 4,
    grid_cap: int = 20_000,
) -> Optional[List[Fraction]]:
    """Search for a rational w != sigma with every generator vanishing at w.

    Strategies in order: coordinate perturbations and scalings, symmetric
    images, a grid of small rationals, then solving generators that become
    univariate after fixing some coordinates. Any returned witness has been
    checked exactly.
    """
    sigma = [Fraction(s) for s in sigma]
    gens = list(J_sigma.generators)
    if not gens:
        w = sigma[:]
        w[0] += 1
        return w
    ev = _Evaluator(gens)

    def good(w):
        return w != sigma and ev.exact(w)

    seen = set()
    for w in _perturbation_candidates(sigma):
        t = tuple(w)
        if t in seen:
            continue
        seen.add(t)
        if good(w):
            return w
    values = _small_rationals(grid_bound, grid_den)
    for batch in _grid_candidates(sigma, values, grid_cap):
        pts = np.array([[float(v) for v in w] for w in batch])
        mask = ev.screen(pts)
        for k in np.nonzero(mask)[0]:
            if good(batch[k]):
                return batch[k]
    try:
        basis = list(J_sigma.basis)
    except GroebnerBudgetExceeded:
        basis = []
    for source in (basis, gens):
        if not source:
            continue
        for w in _propagation_search(source, sigma):
            if good(w):
                return w
    return None


# decision ------------------------------------------------------------------


@dataclass
class GlobalResult:
    verdict: Verdict
    sigma: List[Fraction]
    reason: str
    witness: Optional[List[Fraction]] = None
    J_sigma: List[Polynomial] = field(default_factory=list)
    J_sigma_basis: List[Polynomial] = field(default_factory=list)
    augmented: List[Polynomial] = field(default_factory=list)


def decide_global(chain: IdealChain, sigma: Sequence, max_reductions: int = DEFAULT_MAX_REDUCTIONS) -> GlobalResult:
    """Observable, Unobservable (with a rational witness) or Inconclusive.

    The tests run in order: the substituted ideal equals the maximal ideal
    of sigma; after real square augmentation the maximal ideal lies in its
    radical; a rational witness exists. Unobservable needs a stable chain.
    """
    sigma = [Fraction(s) for s in sigma]
    n = chain.n
    Js = substitute_initial(chain.generators(), sigma, n)
    Js.max_reductions = max_reductions
    ell = maximal_ideal(sigma, n)
    try:
        basis = Js.basis
        if sorted(map(str, basis)) == sorted(map(str, groebner_basis(ell, vars=Js.vars))):
            return GlobalResult(Verdict.OBSERVABLE, sigma, "substituted ideal equals the maximal ideal of sigma", None, list(Js.generators), basis)
        aug, added = sos_real_augment(Js)
        if quotient_is_unit_ideal(aug, ell):
            reason = "maximal ideal of sigma lies in the radical"
            if added:
                reason += " after real sum-of-squares augmentation"
            return GlobalResult(Verdict.OBSERVABLE, sigma, reason, None, list(Js.generators), basis, added)
    except GroebnerBudgetExceeded as exc:
        return GlobalResult(Verdict.INCONCLUSIVE, sigma, f"resource limit: {exc}", None, list(Js.generators))
    w = find_counterexample(Js, sigma)
    if w is None:
        return GlobalResult(Verdict.INCONCLUSIVE, sigma, "no rational witness found", None, list(Js.generators), basis, added)
    if not chain.stabilized or chain.truncated:
        return GlobalResult(Verdict.INCONCLUSIVE, sigma, "witness found but the chain was not shown to stabilise", w, list(Js.generators), basis, added)
    return GlobalResult(Verdict.UNOBSERVABLE, sigma, "rational initial state with identical outputs", w, list(Js.generators), basis, added)


def check_witness(chain: IdealChain, sigma: Sequence, witness: Sequence) -> bool:
    """Every pair generator of J_N vanishes at (xi, eta) = (witness, sigma)."""
    point = [Fraction(v) for v in witness] + [Fraction(v) for v in sigma]
    return all(g.evaluate(point) == 0 for g in chain.generators())


# tensor-path generators ----------------------------------------------------


def theorem1_generators(A: SparseTensor, C: SparseTensor, N: int) -> List[Tuple[SparseTensor, Polynomial]]:
    """Tensors E_0..E_N with E_0 = sym(C), E_r = sym(E_{r-1}) o A.

    The form E_r x^{deg} equals L_f^r (C x^k) up to the nonzero factor
    prod of the intermediate degrees, where f = A x^{k-1}.
    """
    if A.dim != C.dim:
        raise ValueError("dimension mismatch")
    xs = state_vars(A.dim)
    E = symmetrize(C)
    out = [(E, tensor_form(E, xs))]
    for _ in range(N):
        E = circ_contract(symmetrize(E), A)
        out.append((E, tensor_form(E, xs)))
    return out


def theorem1_scale(A: SparseTensor, C: SparseTensor, r: int) -> int:
    """The factor relating L_f^r (C x^k) to E_r x^{deg}."""
    s, d = 1, C.order
    for _ in range(r):
        s *= d
        d += A.order - 2
    return s


@dataclass
class PathTerm:
    output: int
    path: Tuple[Tuple[int, int], ...]  # (slot, index of the dynamics tensor) per step
    tensor: SparseTensor


def theorem2_generators(sys: HypergraphSystem, r_max: int, path_cap: int = 200_000) -> List[List[PathTerm]]:
    """Propagation paths: repeatedly contract one slot of an output tensor with a dynamics tensor.

    Summing the forms of all paths at level r for output i gives L_f^r h_i.
    """
    level = [PathTerm(i + 1, (), C) for i, ts in enumerate(sys.outputs) for C in ts if not C.is_zero()]
    levels = [level]
    total = len(level)
    for _ in range(r_max):
        nxt = []
        for term in level:
            for s in range(1, term.tensor.order + 1):
                for a, A in enumerate(sys.dynamics):
                    if A.order + term.tensor.order - 2 < 1:
                        continue
                    T = slot_contract(term.tensor, A, s)
                    if T.is_zero():
                        continue
                    nxt.append(PathTerm(term.output, term.path + ((s, a),), T))
                    total += 1
                    if total > path_cap:
                        raise RuntimeError(f"more than {path_cap} propagation paths")
        levels.append(nxt)
        level = nxt
    return levels


def path_level_sums(sys: HypergraphSystem, levels: List[List[PathTerm]]) -> List[List[Polynomial]]:
    xs = state_vars(sys.n)
    out = []
    for level in levels:
        sums = [Polynomial.zero(xs) for _ in range(sys.q)]
        for t in level:
            sums[t.output - 1] = sums[t.output - 1] + tensor_form(t.tensor, xs)
        out.append(sums)
    return out


def lie_levels(sys: HypergraphSystem, r_max: int) -> List[List[Polynomial]]:
    """L_f^r h_i for r = 0..r_max, drift only."""
    xs = state_vars(sys.n)
    f = lower_dynamics(sys, xs)
    cur = lower_outputs(sys, xs)
    out = [cur]
    for _ in range(r_max):
        cur = [lie_derivative(h, f, xs) for h in cur]
        out.append(cur)
    return out
