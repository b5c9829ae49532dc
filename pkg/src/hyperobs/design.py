"""Output design: sensors whose readings stay constant along the drift.

Candidate outputs are polynomials y = gamma . M_d(x) in the monomials of
degree 1..d with L_f y = 0. The kernel of the linear map gamma -> L_f y
gives them exactly. Starting from the best single kernel vector, the
design adds kernel vectors (as a new sensor while the budget p allows,
otherwise into the last sensor), raises d, and finally relaxes to
L_f^r y = 0 for r >= 2. Each candidate set is checked by the global test.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from .globalobs import GlobalResult, Verdict, build_chain, decide_global
from .groebner import GroebnerBudgetExceeded
from .linalg import nullspace, rank
from .poly import Exponent, Polynomial, lie_derivative, state_vars
from .system import HypergraphSystem, lower_dynamics, lower_outputs, output_tensors


def monomial_basis(n: int, d: int) -> List[Exponent]:
    """All monomials of degree 1..d, by degree and then lexicographically descending.

    For n = 3, d = 2: x1, x2, x3, x1^2, x1x2, x1x3, x2^2, x2x3, x3^2.
    """
    out: List[Exponent] = []
    for k in range(1, d + 1):
        level: List[Exponent] = []

        def rec(prefix, left, slots):
            if slots == 1:
                level.append(tuple(prefix + [left]))
                return
            for a in range(left, -1, -1):
                rec(prefix + [a], left - a, slots - 1)

        rec([], k, n)
        out.extend(level)
    assert len(out) == comb(n + d, d) - 1
    return out


def vanishing_constraint_matrix(
    f: Sequence[Polynomial], basis: Sequence[Exponent], r: int = 1
) -> Tuple[List[List[Fraction]], List[Exponent]]:
    """Rows are monomials of L_f^r(m_j); column j holds the coefficients for basis monomial j.

    gamma is in the kernel exactly when L_f^r (gamma . M) is the zero polynomial.
    """
    xs = f[0].vars
    images = []
    for e in basis:
        p = Polynomial.monomial(e, xs)
        for _ in range(r):
            p = lie_derivative(p, f, xs)
        images.append(p)
    monos = sorted({m for p in images for m in p.terms}, key=lambda e: (sum(e), tuple(-k for k in e)))
    M = [[p.terms.get(m, Fraction(0)) for p in images] for m in monos]
    return M, monos


def exact_nullspace(M: Sequence[Sequence[Fraction]], ncols: int) -> List[List[Fraction]]:
    return nullspace(M, ncols)


def kernel_polynomial(v: Sequence[Fraction], basis: Sequence[Exponent], xs: Sequence[str]) -> Polynomial:
    return Polynomial({e: c for e, c in zip(basis, v) if c}, xs)


def _support_vars(v: Sequence[Fraction], basis: Sequence[Exponent]) -> set:
    return {i for c, e in zip(v, basis) if c for i, k in enumerate(e) if k}


def select_candidate(
    kernel: Sequence[Sequence[Fraction]], basis: Sequence[Exponent], covered: set = frozenset(), used: set = frozenset()
) -> Optional[int]:
    """Index of the unused kernel vector that covers the most new state variables.

    Ties go to the sparser vector, then to the earlier one.
    """
    best, best_key = None, None
    for k, v in enumerate(kernel):
        if k in used:
            continue
        sup = _support_vars(v, basis)
        key = (-len(sup - set(covered)), sum(1 for c in v if c), k)
        if best_key is None or key < best_key:
            best, best_key = k, key
    return best


def greedy_cover(kernel: Sequence[Sequence[Fraction]], basis: Sequence[Exponent], p: int, covered: set = frozenset()) -> List[int]:
    """Up to p kernel vectors chosen greedily, stopping when nothing new is covered."""
    picks: List[int] = []
    covered = set(covered)
    while len(picks) < p:
        k = select_candidate(kernel, basis, covered, set(picks))
        if k is None or not (_support_vars(kernel[k], basis) - covered):
            break
        picks.append(k)
        covered |= _support_vars(kernel[k], basis)
    return picks


@dataclass
class DesignConfig:
    d_max: int = 2
    p: int = 1
    r_relax: int = 3
    max_support: int = 4
    r_cap: Optional[int] = None
    max_reductions: int = 50_000


@dataclass
class DesignResult:
    success: bool
    outputs: List[Polynomial]  # designed outputs only
    all_outputs: List[Polynomial]  # existing outputs followed by designed ones
    degree: Optional[int]
    relaxed_order: int  # 1 when L_f y = 0, r when L_f^r y = 0 was needed
    verdict: Optional[GlobalResult]
    kernels: Dict[int, List[Polynomial]] = field(default_factory=dict)
    log: List[str] = field(default_factory=list)
    reason: str = ""


def _check(sys: HypergraphSystem, outs: Sequence[Polynomial], sigma, cfg: DesignConfig) -> GlobalResult:
    cand = sys.with_outputs([output_tensors(h, sys.n) for h in outs])
    try:
        chain = build_chain(cand, cfg.r_cap, max_reductions=cfg.max_reductions)
    except GroebnerBudgetExceeded as exc:
        return GlobalResult(Verdict.INCONCLUSIVE, [Fraction(s) for s in sigma], f"resource limit: {exc}")
    return decide_global(chain, sigma, cfg.max_reductions)


def design_outputs(sys: HypergraphSystem, cfg: DesignConfig = DesignConfig(), sigma: Optional[Sequence] = None) -> DesignResult:
    """Design at most p outputs (existing ones included) making the system observable at sigma."""
    n = sys.n
    sigma = [Fraction(0)] * n if sigma is None else [Fraction(s) for s in sigma]
    xs = state_vars(n)
    f = lower_dynamics(sys.autonomous(), xs)
    existing = [h for h in lower_outputs(sys, xs) if not h.is_zero()]
    log: List[str] = []
    kernels: Dict[int, List[Polynomial]] = {}

    def result(ok, designed, d, r, verdict, reason):
        return DesignResult(ok, list(designed), existing + list(designed), d, r, verdict, kernels, log, reason)

    if existing:
        v = _check(sys, existing, sigma, cfg)
        log.append(f"existing outputs: {v.verdict.value}")
        if v.verdict == Verdict.OBSERVABLE:
            return result(True, [], None, 1, v, "existing outputs already suffice")
    if cfg.p <= len(existing):
        return result(False, [], None, 1, None, "no sensor budget left beyond the existing outputs")
    covered0 = {i for h in existing for e in h.terms for i, k in enumerate(e) if k}

    last_designed: List[Polynomial] = []
    for d in range(1, cfg.d_max + 1):
        basis = monomial_basis(n, d)
        M, _ = vanishing_constraint_matrix(f, basis, 1)
        K = exact_nullspace(M, len(basis))
        kernels[d] = [kernel_polynomial(v, basis, xs) for v in K]
        log.append(f"degree {d}: kernel dimension {len(K)}")
        if not K:
            continue
        designed: List[Polynomial] = []
        used: set = set()
        covered = set(covered0)
        while True:
            k = select_candidate(K, basis, covered, used)
            if k is None:
                break
            used.add(k)
            vpoly = kernel_polynomial(K[k], basis, xs)
            covered |= _support_vars(K[k], basis)
            if len(existing) + len(designed) < cfg.p:
                designed.append(vpoly)
                log.append(f"degree {d}: new sensor {vpoly}")
            else:
                designed[-1] = designed[-1] + vpoly
                log.append(f"degree {d}: sensor {len(designed)} extended to {designed[-1]}")
            v = _check(sys, existing + designed, sigma, cfg)
            log.append(f"  -> {v.verdict.value}")
            if v.verdict == Verdict.OBSERVABLE:
                return result(True, designed, d, 1, v, "observable with outputs constant along the drift")
        last_designed = designed

    # relax to outputs whose r-th Lie derivative vanishes
    d = cfg.d_max
    basis = monomial_basis(n, d)
    prev = [list(v) for v in exact_nullspace(vanishing_constraint_matrix(f, basis, 1)[0], len(basis))]
    for r in range(2, cfg.r_relax + 1):
        M, _ = vanishing_constraint_matrix(f, basis, r)
        K = exact_nullspace(M, len(basis))
        fresh = [v for v in K if rank(prev + [v]) > rank(prev)] if prev else K
        fresh = [v for v in fresh if sum(1 for c in v if c) <= cfg.max_support]
        log.append(f"order {r}: {len(fresh)} new sparse kernel vectors")
        for v in fresh:
            vpoly = kernel_polynomial(v, basis, xs)
            designed = list(last_designed)
            if len(existing) + len(designed) < cfg.p:
                designed.append(vpoly)
            elif designed:
                designed[-1] = designed[-1] + vpoly
            else:
                continue
            res = _check(sys, existing + designed, sigma, cfg)
            log.append(f"order {r}: try {[str(h) for h in designed]} -> {res.verdict.value}")
            if res.verdict == Verdict.OBSERVABLE:
                return result(True, designed, d, r, res, f"observable with L_f^{r} y = 0")
        prev = [list(v) for v in K]
    return result(False, last_designed, None, 1, None, "no candidate within the degree and relaxation bounds")
