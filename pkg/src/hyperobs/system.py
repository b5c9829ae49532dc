"""Polynomial systems on hypergraphs and their lowering to polynomials.

    x' = sum_k A_k x^{k-1} + sum_j (sum_k B_{k,j} x^{k-1}) u_j
    y_i = sum_k C_{i,k} x^k + sum_l (sum_k D_{i,k,l} x^k) u_l
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from .poly import Polynomial, state_vars
from .tensor import SparseTensor, TensorError


@dataclass(frozen=True)
class DirectTerm:
    """A term D x^k u_l added to output ``output`` (both 1-based)."""

    output: int
    input: int
    tensor: SparseTensor


@dataclass(frozen=True)
class HypergraphSystem:
    n: int
    dynamics: Tuple[SparseTensor, ...] = ()
    inputs: Tuple[Tuple[SparseTensor, ...], ...] = ()
    outputs: Tuple[Tuple[SparseTensor, ...], ...] = ()
    direct: Tuple[DirectTerm, ...] = ()
    labels: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        tensors = list(self.dynamics) + [t for ts in self.inputs for t in ts] + [t for ts in self.outputs for t in ts]
        tensors += [d.tensor for d in self.direct]
        for t in tensors:
            if t.dim != self.n:
                raise TensorError(f"tensor of dimension {t.dim} in a system with n={self.n}")
        for t in list(self.dynamics) + [t for ts in self.inputs for t in ts]:
            if t.order < 1:
                raise TensorError("dynamics tensors need order >= 1")
        for d in self.direct:
            if not 1 <= d.output <= len(self.outputs):
                raise TensorError(f"direct term refers to missing output {d.output}")
            if d.input < 1:
                raise TensorError("input indices are 1-based")
        if self.labels and len(self.labels) != self.n:
            raise TensorError("labels must name every state")

    @property
    def q(self) -> int:
        return len(self.outputs)

    @property
    def m(self) -> int:
        """Number of inputs referenced by B or D tensors."""
        return max([len(self.inputs)] + [d.input for d in self.direct])

    @property
    def max_order(self) -> int:
        ts = list(self.dynamics) + [t for ts in self.inputs for t in ts] + [t for ts in self.outputs for t in ts]
        ts += [d.tensor for d in self.direct]
        return max((t.order for t in ts), default=1)

    def has_inputs(self) -> bool:
        return any(t.nnz() for ts in self.inputs for t in ts) or any(d.tensor.nnz() for d in self.direct)

    def with_outputs(self, outputs: Sequence[Sequence[SparseTensor]]) -> "HypergraphSystem":
        return HypergraphSystem(self.n, self.dynamics, self.inputs, tuple(tuple(o) for o in outputs), (), self.labels)

    def autonomous(self) -> "HypergraphSystem":
        """The drift-only system obtained by setting every input to zero."""
        return HypergraphSystem(self.n, self.dynamics, (), self.outputs, (), self.labels)


def normalized(sys: HypergraphSystem) -> HypergraphSystem:
    """Divide A, B weights by (k-1)! and C, D weights by k!."""

    def f(t: SparseTensor, k: int) -> SparseTensor:
        return t.scaled(Fraction(1, math.factorial(k)))

    return HypergraphSystem(
        sys.n,
        tuple(f(t, t.order - 1) for t in sys.dynamics),
        tuple(tuple(f(t, t.order - 1) for t in ts) for ts in sys.inputs),
        tuple(tuple(f(t, t.order) for t in ts) for ts in sys.outputs),
        tuple(DirectTerm(d.output, d.input, f(d.tensor, d.tensor.order)) for d in sys.direct),
        sys.labels,
    )


def tensor_field(T: SparseTensor, vars: Sequence[str]) -> List[Polynomial]:
    """Symbolic A x^{k-1} with x the first T.dim variables of ``vars``."""
    vars = tuple(vars)
    nv = len(vars)
    acc: List[Dict] = [dict() for _ in range(T.dim)]
    for idx, w in T.items():
        e = [0] * nv
        for i in idx[:-1]:
            e[i - 1] += 1
        e = tuple(e)
        d = acc[idx[-1] - 1]
        d[e] = d.get(e, 0) + w
    return [Polynomial(d, vars) for d in acc]


def tensor_form(T: SparseTensor, vars: Sequence[str]) -> Polynomial:
    """Symbolic C x^k with x the first T.dim variables of ``vars``."""
    vars = tuple(vars)
    acc: Dict = {}
    for idx, w in T.items():
        e = [0] * len(vars)
        for i in idx:
            e[i - 1] += 1
        e = tuple(e)
        acc[e] = acc.get(e, 0) + w
    return Polynomial(acc, vars)


def lower_dynamics(sys: HypergraphSystem, vars: Sequence[str] | None = None) -> List[Polynomial]:
    """Drift field f_i(x) = sum_k (A_k x^{k-1})_i."""
    vars = tuple(vars) if vars is not None else state_vars(sys.n)
    out = [Polynomial.zero(vars) for _ in range(sys.n)]
    for A in sys.dynamics:
        out = [a + b for a, b in zip(out, tensor_field(A, vars))]
    return out


def lower_input_fields(sys: HypergraphSystem, vars: Sequence[str] | None = None) -> List[List[Polynomial]]:
    """One field g_j(x) = sum_k B_{k,j} x^{k-1} per input."""
    vars = tuple(vars) if vars is not None else state_vars(sys.n)
    fields = []
    for ts in sys.inputs:
        g = [Polynomial.zero(vars) for _ in range(sys.n)]
        for B in ts:
            g = [a + b for a, b in zip(g, tensor_field(B, vars))]
        fields.append(g)
    return fields


def lower_outputs(sys: HypergraphSystem, vars: Sequence[str] | None = None) -> List[Polynomial]:
    """Output maps h_i(x) = sum_k C_{i,k} x^k, ignoring direct input terms."""
    vars = tuple(vars) if vars is not None else state_vars(sys.n)
    out = []
    for ts in sys.outputs:
        h = Polynomial.zero(vars)
        for C in ts:
            h = h + tensor_form(C, vars)
        out.append(h)
    return out


def lower_direct(sys: HypergraphSystem, vars: Sequence[str] | None = None) -> Dict[Tuple[int, int], Polynomial]:
    """Map (output i, input l) to the polynomial multiplying u_l in y_i."""
    vars = tuple(vars) if vars is not None else state_vars(sys.n)
    out: Dict[Tuple[int, int], Polynomial] = {}
    for d in sys.direct:
        key = (d.output, d.input)
        out[key] = out.get(key, Polynomial.zero(vars)) + tensor_form(d.tensor, vars)
    return out


def system_from_polynomials(f: Sequence[Polynomial], h: Sequence[Polynomial]) -> HypergraphSystem:
    """Inverse of lowering for homogeneous-per-degree polynomial fields.

    Each monomial x^a in f_i becomes the entry (sorted heads..., i) of the
    tensor of order |a|+1; each monomial of h becomes a sorted index of
    order |a|. Constant outputs are rejected; a constant drift term becomes
    an order-1 tensor.
    """
    n = len(f)
    dyn: Dict[int, SparseTensor] = {}
    for i, fi in enumerate(f, start=1):
        for e, c in fi.terms.items():
            heads = tuple(j + 1 for j, k in enumerate(e[:n]) for _ in range(k))
            dyn.setdefault(len(heads) + 1, SparseTensor(len(heads) + 1, n)).add(heads + (i,), c)
    outs = [output_tensors(hi, n) for hi in h]
    return HypergraphSystem(n, tuple(dyn[k] for k in sorted(dyn)), (), tuple(outs))


def output_tensors(h: Polynomial, n: int) -> Tuple[SparseTensor, ...]:
    """Tensors C_k with sum_k C_k x^k = h, one sorted index per monomial."""
    ts: Dict[int, SparseTensor] = {}
    for e, c in h.terms.items():
        idx = tuple(j + 1 for j, k in enumerate(e[:n]) for _ in range(k))
        if not idx:
            raise TensorError("constant output terms cannot be written as hyperedges")
        ts.setdefault(len(idx), SparseTensor(len(idx), n)).add(idx, c)
    return tuple(ts[k] for k in sorted(ts))
