"""Local (rank) observability through Kronecker-factored observability matrices.

With x^{[d]} the d-fold Kronecker power, d/dt x^{[d]} = sum_m Abar_{d,m} x^{[d+m-2]}
where Abar_{d,m} = sum_j I (x) .. (x) unfold(A_m) (x) .. (x) I. Lie
derivatives of an output are row vectors over Kronecker powers pushed
through these factors; the observability matrix is the Jacobian of the
stacked rows. Every construction here has a direct counterpart that
differentiates iterated Lie derivatives symbolically, used as an oracle.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from .linalg import SparseMatrix, add_into, kron_identity_sandwich, rank
from .poly import Polynomial, lie_derivative, state_vars
from .system import HypergraphSystem, lower_direct, lower_dynamics, lower_input_fields, lower_outputs
from .tensor import SparseTensor, mixed_radix, unfold

Row = Dict[int, object]  # Kronecker index -> coefficient (Fraction or Polynomial)
Rows = Dict[int, Row]  # degree -> row


def jet_vars(m: int, order: int) -> Tuple[str, ...]:
    """u{l}_{s} is the s-th time derivative of input l."""
    return tuple(f"u{l}_{s}" for l in range(1, m + 1) for s in range(order + 1))


def unfold_matrix(A: SparseTensor) -> SparseMatrix:
    return SparseMatrix((A.dim, A.dim ** (A.order - 1)), unfold(A))


class _Factors:
    """Cache of Abar_{d,m} for one list of tensors."""

    def __init__(self, tensors: Sequence[SparseTensor], n: int):
        self.n = n
        self.by_order: Dict[int, SparseMatrix] = {}
        for A in tensors:
            U = unfold_matrix(A)
            if A.order in self.by_order:
                add_into(self.by_order[A.order], U)
            else:
                self.by_order[A.order] = U
        self.cache: Dict[Tuple[int, int], SparseMatrix] = {}

    def get(self, d: int, m: int) -> SparseMatrix:
        key = (d, m)
        if key not in self.cache:
            n = self.n
            U = self.by_order[m]
            acc = SparseMatrix((n**d, n ** (d + m - 2)))
            for j in range(1, d + 1):
                add_into(acc, kron_identity_sandwich(U, n, j - 1, d - j))
            self.cache[key] = acc
        return self.cache[key]

    def step(self, rows: Rows) -> Rows:
        out: Rows = {}
        for d, row in rows.items():
            if d == 0 or not row:
                continue
            for m in self.by_order:
                if d + m - 2 < 0:
                    continue
                _accumulate(out, d + m - 2, self.get(d, m).left_multiply(row))
        return out


def bar_a_factor(sys: HypergraphSystem, degree: int) -> Dict[int, SparseMatrix]:
    """Abar_{degree,m} for every dynamics order m present, as sparse matrices."""
    return {m: _Factors(sys.dynamics, sys.n).get(degree, m) for m in sorted({A.order for A in sys.dynamics})}


def _accumulate(acc: Rows, d: int, row: Row) -> None:
    tgt = acc.setdefault(d, {})
    for j, v in row.items():
        if j in tgt:
            w = tgt[j] + v
            if w:
                tgt[j] = w
            else:
                del tgt[j]
        else:
            tgt[j] = v


def _add_rows(a: Rows, b: Rows) -> Rows:
    out: Rows = {d: dict(r) for d, r in a.items()}
    for d, r in b.items():
        _accumulate(out, d, r)
    return out


def _scale_rows(a: Rows, c) -> Rows:
    return {d: {j: v * c for j, v in r.items()} for d, r in a.items()}


def output_rows(tensors: Sequence[SparseTensor]) -> Rows:
    rows: Rows = {}
    for C in tensors:
        _accumulate(rows, C.order, {mixed_radix(idx, C.dim): w for idx, w in C.items()})
    return rows


def _decode(pos: int, n: int, d: int) -> Tuple[int, ...]:
    digits = []
    for _ in range(d):
        digits.append(pos % n)
        pos //= n
    return tuple(reversed(digits))


def rows_to_polynomial(rows: Rows, n: int, vars: Sequence[str]) -> Polynomial:
    """sum_d row_d x^{[d]} with x the first n variables of ``vars``."""
    vars = tuple(vars)
    out: Dict[Tuple[int, ...], object] = {}
    poly_out = Polynomial.zero(vars)
    for d, row in rows.items():
        for pos, c in row.items():
            e = [0] * len(vars)
            for i in _decode(pos, n, d):
                e[i] += 1
            e = tuple(e)
            if isinstance(c, Polynomial):
                poly_out = poly_out + c.mul_term(e, 1)
            else:
                out[e] = out.get(e, 0) + c
    return poly_out + Polynomial(out, vars)


def gradient(p: Polynomial, xvars: Sequence[str]) -> List[Polynomial]:
    return [p.diff(v) for v in xvars]


# factored matrices --------------------------------------------------------


@dataclass
class ObservabilityMatrix:
    """Rows of polynomials (one per output and Lie order) and the space they live in."""

    rows: List[List[Polynomial]]
    vars: Tuple[str, ...]
    n: int
    labels: List[Tuple[int, int]]  # (output, Lie order) per row
    method: str = "factored"

    def evaluate(self, point: Sequence) -> List[List[Fraction]]:
        return [[p.evaluate(point) for p in row] for row in self.rows]


def factored_lie_rows(sys: HypergraphSystem, r_max: int) -> List[List[Rows]]:
    """Per output, the Kronecker rows of L_f^r h for r = 0..r_max (drift only)."""
    F = _Factors(sys.dynamics, sys.n)
    out = []
    for ts in sys.outputs:
        cur = output_rows(ts)
        levels = [cur]
        for _ in range(r_max):
            cur = F.step(cur)
            levels.append(cur)
        out.append(levels)
    return out


def matrix_O(sys: HypergraphSystem, r_max: Optional[int] = None) -> ObservabilityMatrix:
    """Jacobian rows of L_f^r h_i, r = 0..n-1, for the drift of the system."""
    r_max = sys.n - 1 if r_max is None else r_max
    xs = state_vars(sys.n)
    rows, labels = [], []
    for i, levels in enumerate(factored_lie_rows(sys, r_max), start=1):
        for r, R in enumerate(levels):
            rows.append(gradient(rows_to_polynomial(R, sys.n, xs), xs))
            labels.append((i, r))
    return ObservabilityMatrix(rows, xs, sys.n, labels)


def _jet_shift(p: Polynomial, m: int, order: int) -> Polynomial:
    """Time derivative of a polynomial in input jets: u_s -> u_{s+1}."""
    out = Polynomial.zero(p.vars)
    for l in range(1, m + 1):
        for s in range(order):
            d = p.diff(f"u{l}_{s}")
            if d:
                out = out + d * Polynomial.variable(f"u{l}_{s + 1}", p.vars)
    return out


def matrix_O1(sys: HypergraphSystem, r_max: Optional[int] = None) -> ObservabilityMatrix:
    """Observability matrix with inputs entering the dynamics through B tensors.

    Coefficients become polynomials in input jets; each Lie step applies
    Abar for A plus u_j times Abar for B_j, and differentiates the
    coefficients in time (the Leibniz terms).
    """
    if sys.direct:
        raise ValueError("direct feedthrough terms are handled by matrix_O2 or the direct oracle")
    n = sys.n
    r_max = n - 1 if r_max is None else r_max
    m = len(sys.inputs)
    space = state_vars(n) + jet_vars(m, r_max)
    F = _Factors(sys.dynamics, n)
    Bs = [(_Factors(ts, n), Polynomial.variable(f"u{j}_0", space)) for j, ts in enumerate(sys.inputs, start=1) if ts]
    rows, labels = [], []
    for i, ts in enumerate(sys.outputs, start=1):
        cur: Rows = {d: {k: Polynomial.constant(v, space) for k, v in r.items()} for d, r in output_rows(ts).items()}
        for r in range(r_max + 1):
            rows.append(gradient(rows_to_polynomial(cur, n, space), space[:n]))
            labels.append((i, r))
            if r == r_max:
                break
            nxt = F.step(cur)
            for Fb, u in Bs:
                nxt = _add_rows(nxt, _scale_rows(Fb.step(cur), u))
            shifted = {d: {k: _jet_shift(v, m, r_max) for k, v in row.items()} for d, row in cur.items()}
            cur = _add_rows(nxt, shifted)
            cur = {d: {k: v for k, v in row.items() if v} for d, row in cur.items()}
    return ObservabilityMatrix(rows, space, n, labels)


def yanghui_row(k: int) -> List[int]:
    """The k-th row of Pascal's triangle, binomial(k-1, p-1) for p = 1..k."""
    if k < 1:
        raise ValueError("rows are numbered from 1")
    return [comb(k - 1, p - 1) for p in range(1, k + 1)]


def matrix_O2(sys: HypergraphSystem, r_max: Optional[int] = None) -> ObservabilityMatrix:
    """Observability matrix for outputs with direct terms D x^k u_l and input-free dynamics.

    L_f^r y_i = (C + sum_l D_l u_l) Abar^r x + sum_l sum_{p=1..r} a_{p+1} D_l Abar^{r-p} x u_l^{(p)}
    with a the (r+1)-th row of Pascal's triangle.
    """
    if any(t.nnz() for ts in sys.inputs for t in ts):
        raise ValueError("inputs in the dynamics are handled by matrix_O1 or the direct oracle")
    n = sys.n
    r_max = n - 1 if r_max is None else r_max
    m = sys.m
    space = state_vars(n) + jet_vars(m, r_max)
    xs = space[:n]
    F = _Factors(sys.dynamics, n)
    rows, labels = [], []
    for i, ts in enumerate(sys.outputs, start=1):
        c_levels = [output_rows(ts)]
        for _ in range(r_max):
            c_levels.append(F.step(c_levels[-1]))
        d_levels: Dict[int, List[Rows]] = {}
        for d in sys.direct:
            if d.output != i:
                continue
            base = output_rows([d.tensor])
            lv = d_levels.setdefault(d.input, [{}])
            lv[0] = _add_rows(lv[0], base)
        for l, lv in d_levels.items():
            for _ in range(r_max):
                lv.append(F.step(lv[-1]))
        for r in range(r_max + 1):
            p_total = rows_to_polynomial(c_levels[r], n, space)
            a = yanghui_row(r + 1)
            for l, lv in d_levels.items():
                for p in range(0, r + 1):
                    u = Polynomial.variable(f"u{l}_{p}", space)
                    p_total = p_total + rows_to_polynomial(lv[r - p], n, space) * u * a[p]
            rows.append(gradient(p_total, xs))
            labels.append((i, r))
    return ObservabilityMatrix(rows, space, n, labels)


# direct oracle ------------------------------------------------------------


def extended_lie_derivatives(sys: HypergraphSystem, r_max: int) -> Tuple[List[List[Polynomial]], Tuple[str, ...]]:
    """L^r y_i for the extended field (f + sum g_j u_j, u_j^{(s)} -> u_j^{(s+1)})."""
    n = sys.n
    m = sys.m
    space = state_vars(n) + jet_vars(m, r_max)
    xs = space[:n]
    f = lower_dynamics(sys, space)
    for j, g in enumerate(lower_input_fields(sys, space), start=1):
        u = Polynomial.variable(f"u{j}_0", space)
        f = [a + b * u for a, b in zip(f, g)]
    ys = lower_outputs(sys, space)
    for (i, l), d in lower_direct(sys, space).items():
        ys[i - 1] = ys[i - 1] + d * Polynomial.variable(f"u{l}_0", space)
    out = []
    for y in ys:
        levels = [y]
        for _ in range(r_max):
            cur = levels[-1]
            levels.append(lie_derivative(cur, f, xs) + _jet_shift(cur, m, r_max))
        out.append(levels)
    return out, space


def direct_observability_matrix(sys: HypergraphSystem, r_max: Optional[int] = None) -> ObservabilityMatrix:
    n = sys.n
    r_max = n - 1 if r_max is None else r_max
    lv, space = extended_lie_derivatives(sys, r_max)
    rows, labels = [], []
    for i, levels in enumerate(lv, start=1):
        for r, p in enumerate(levels):
            rows.append(gradient(p, space[:n]))
            labels.append((i, r))
    return ObservabilityMatrix(rows, space, n, labels, "direct")


def observability_matrix(sys: HypergraphSystem, r_max: Optional[int] = None) -> ObservabilityMatrix:
    """Pick the factored construction that fits the system; fall back to the oracle."""
    has_b = any(t.nnz() for ts in sys.inputs for t in ts)
    has_d = any(d.tensor.nnz() for d in sys.direct)
    if has_b and has_d:
        return direct_observability_matrix(sys, r_max)
    if has_d:
        return matrix_O2(sys, r_max)
    if has_b:
        return matrix_O1(sys, r_max)
    return matrix_O(sys, r_max)


# rank tests ---------------------------------------------------------------


def random_rational_point(rng: random.Random, k: int) -> List[Fraction]:
    """Coordinates with numerators in -10..10 without 0 and denominators 1..7."""
    nums = [v for v in range(-10, 11) if v]
    return [Fraction(rng.choice(nums), rng.randint(1, 7)) for _ in range(k)]


@dataclass
class RankResult:
    rank: int
    n: int
    mode: str
    points: List[List[Fraction]]
    ranks: List[int]
    method: str
    vanishing: List[str] = field(default_factory=list)

    @property
    def full_rank(self) -> bool:
        return self.rank == self.n


def rank_test(
    O: ObservabilityMatrix,
    point: Optional[Sequence] = None,
    seed: int = 0,
    samples: int = 3,
) -> RankResult:
    """Exact rank at a point, or the generic rank as the maximum over random rational points.

    A point may give values for the state only; input jets are then drawn
    at random from the seed.
    """
    rng = random.Random(seed)
    nv = len(O.vars)
    if point is not None:
        pt = [Fraction(v) for v in point]
        if len(pt) < nv:
            pt = pt + random_rational_point(rng, nv - len(pt))
        r = rank(O.evaluate(pt))
        return RankResult(r, O.n, "at_point", [pt], [r], O.method)
    if samples < 3:
        raise ValueError("generic rank needs at least 3 sample points")
    pts = [random_rational_point(rng, nv) for _ in range(samples)]
    ranks = [rank(O.evaluate(p)) for p in pts]
    return RankResult(max(ranks), O.n, "generic", pts, ranks, O.method)


def vanishing_conditions(O: ObservabilityMatrix) -> List[str]:
    """Factors of the gcd of all maximal minors, for small state dimension."""
    import itertools

    import sympy

    n = O.n
    if n > 3 or len(O.rows) < n:
        return []
    syms = sympy.symbols(O.vars)

    def to_expr(p: Polynomial):
        return sum(
            (sympy.Rational(c.numerator, c.denominator) * sympy.Mul(*[s**k for s, k in zip(syms, e)]) for e, c in p.terms.items()),
            sympy.Integer(0),
        )

    M = sympy.Matrix([[to_expr(p) for p in row] for row in O.rows])
    g = None
    for sel in itertools.combinations(range(M.rows), n):
        det = sympy.expand(M.extract(list(sel), list(range(n))).det())
        if det == 0:
            continue
        g = det if g is None else sympy.gcd(g, det)
        if g.is_number:
            return []
    if g is None:
        return ["0"]
    _, factors = sympy.factor_list(g)
    return [str(f) if k == 1 else f"({f})^{k}" for f, k in factors if not f.is_number]


def local_observability(
    sys: HypergraphSystem,
    point: Optional[Sequence] = None,
    seed: int = 0,
    samples: int = 3,
    with_conditions: bool = False,
) -> RankResult:
    O = observability_matrix(sys)
    res = rank_test(O, point, seed, samples)
    if with_conditions:
        res.vanishing = vanishing_conditions(O)
    return res
