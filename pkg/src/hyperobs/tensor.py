"""Sparse rational tensors over 1-based index tuples.

A tensor of order k and dimension n stores only nonzero entries. When a
tensor describes hyperedges of a dynamical system the leading k-1 indices
are the heads and the last index is the tail, so

    (A x^{k-1})_i = sum A[i1, ..., i_{k-1}, i] x_{i1} ... x_{i_{k-1}}.
"""
from __future__ import annotations

import math
from fractions import Fraction
from itertools import permutations, product
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

Index = Tuple[int, ...]
Scalar = Union[int, Fraction]


class TensorError(ValueError):
    pass


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, str)):
        return Fraction(v)
    raise TensorError(f"weight must be exact (int, Fraction or 'p/q'), got {type(v).__name__}")


class SparseTensor:
    __slots__ = ("order", "dim", "_entries")

    def __init__(self, order: int, dim: int, entries: Mapping[Index, Scalar] | Iterable = ()):
        if order < 1 or dim < 1:
            raise TensorError("order and dimension must be positive")
        self.order = order
        self.dim = dim
        self._entries: Dict[Index, Fraction] = {}
        items = entries.items() if isinstance(entries, Mapping) else entries
        for idx, w in items:
            self.add(tuple(idx), w)

    def _check(self, idx: Index) -> None:
        if len(idx) != self.order:
            raise TensorError(f"index {idx} has length {len(idx)}, expected {self.order}")
        for i in idx:
            if not isinstance(i, int) or not 1 <= i <= self.dim:
                raise TensorError(f"index {idx} out of range 1..{self.dim}")

    def add(self, idx: Index, w: Scalar) -> None:
        """Accumulate ``w`` into entry ``idx``; zero results are dropped."""
        idx = tuple(idx)
        self._check(idx)
        v = self._entries.get(idx, Fraction(0)) + _frac(w)
        if v:
            self._entries[idx] = v
        else:
            self._entries.pop(idx, None)

    def __getitem__(self, idx: Index) -> Fraction:
        return self._entries.get(tuple(idx), Fraction(0))

    def items(self):
        return self._entries.items()

    def nnz(self) -> int:
        return len(self._entries)

    def is_zero(self) -> bool:
        return not self._entries

    def scaled(self, c: Scalar) -> "SparseTensor":
        c = _frac(c)
        return SparseTensor(self.order, self.dim, {k: v * c for k, v in self._entries.items()})

    def __add__(self, other: "SparseTensor") -> "SparseTensor":
        if (self.order, self.dim) != (other.order, other.dim):
            raise TensorError("shape mismatch")
        out = SparseTensor(self.order, self.dim, self._entries)
        for k, v in other.items():
            out.add(k, v)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseTensor):
            return NotImplemented
        return (self.order, self.dim, self._entries) == (other.order, other.dim, other._entries)

    def __hash__(self):
        return hash((self.order, self.dim, frozenset(self._entries.items())))

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {v}" for k, v in sorted(self._entries.items()))
        return f"SparseTensor(order={self.order}, dim={self.dim}, {{{body}}})"

    def is_symmetric(self) -> bool:
        for idx, v in self._entries.items():
            for p in set(permutations(idx)):
                if self[p] != v:
                    return False
        return True


def contract_vector_power(A: SparseTensor, x: Sequence) -> list:
    """Return the vector A x^{k-1}, contracting every head index with x."""
    if len(x) != A.dim:
        raise TensorError("vector length does not match tensor dimension")
    xs = [_frac(v) for v in x]
    out = [Fraction(0)] * A.dim
    for idx, w in A.items():
        t = w
        for i in idx[:-1]:
            t *= xs[i - 1]
            if not t:
                break
        out[idx[-1] - 1] += t
    return out


def contract_full(C: SparseTensor, x: Sequence) -> Fraction:
    """Return the scalar C x^k."""
    if len(x) != C.dim:
        raise TensorError("vector length does not match tensor dimension")
    xs = [_frac(v) for v in x]
    total = Fraction(0)
    for idx, w in C.items():
        t = w
        for i in idx:
            t *= xs[i - 1]
        total += t
    return total


def _distinct_perms(idx: Index):
    return set(permutations(idx))


def symmetrize(T: SparseTensor) -> SparseTensor:
    """Average each entry over the distinct permutations of its index.

    Both T x^k and the symmetrized tensor give the same homogeneous form.
    """
    out = SparseTensor(T.order, T.dim)
    for idx, w in T.items():
        perms = _distinct_perms(idx)
        share = w / len(perms)
        for p in perms:
            out.add(p, share)
    return out


def circ_contract(X: SparseTensor, Y: SparseTensor) -> SparseTensor:
    """Contract the last index of X with the last index of Y.

    Result index is X's leading indices followed by Y's leading indices,
    so the order is order(X) + order(Y) - 2. Orders may differ.
    """
    if X.dim != Y.dim:
        raise TensorError("dimension mismatch")
    order = X.order + Y.order - 2
    if order < 1:
        raise TensorError("contraction of two vectors is a scalar; use contract_full")
    by_tail: Dict[int, list] = {}
    for idx, w in Y.items():
        by_tail.setdefault(idx[-1], []).append((idx[:-1], w))
    out = SparseTensor(order, X.dim)
    for xi, xw in X.items():
        for yi, yw in by_tail.get(xi[-1], ()):
            out.add(xi[:-1] + yi, xw * yw)
    return out


def slot_contract(C: SparseTensor, A: SparseTensor, s: int) -> SparseTensor:
    """Contract slot ``s`` (1-based) of C with the tail of A.

    A's head indices take the place of slot s, giving a tensor of order
    order(C) + order(A) - 2. Summing over all slots and all A gives the Lie
    derivative of the form C x^k along the field sum_m A_m x^{m-1}.
    """
    if C.dim != A.dim:
        raise TensorError("dimension mismatch")
    if not 1 <= s <= C.order:
        raise TensorError(f"slot {s} out of range 1..{C.order}")
    order = C.order + A.order - 2
    if order < 1:
        raise TensorError("result would have order 0")
    by_tail: Dict[int, list] = {}
    for idx, w in A.items():
        by_tail.setdefault(idx[-1], []).append((idx[:-1], w))
    out = SparseTensor(order, C.dim)
    for ci, cw in C.items():
        for heads, aw in by_tail.get(ci[s - 1], ()):
            out.add(ci[: s - 1] + heads + ci[s:], cw * aw)
    return out


def mixed_radix(idx: Index, n: int) -> int:
    """0-based position of a 1-based index tuple, first index most significant."""
    pos = 0
    for i in idx:
        pos = pos * n + (i - 1)
    return pos


def unfold(T: SparseTensor) -> Dict[Tuple[int, int], Fraction]:
    """Mode-k unfolding as a sparse n x n^{k-1} matrix keyed by 0-based (row, col).

    The row is the tail index; the column enumerates the head indices in
    mixed radix with the first head most significant. Multiplying by the
    Kronecker power x^{[k-1]} reproduces contract_vector_power.
    """
    return {(idx[-1] - 1, mixed_radix(idx[:-1], T.dim)): w for idx, w in T.items()}


def kron_power(x: Sequence, k: int) -> list:
    """x^{[k]} = x (x) x (x) ... (x) x with k factors; k = 0 gives [1]."""
    out = [Fraction(1)]
    xs = [_frac(v) for v in x]
    for _ in range(k):
        out = [a * b for a in out for b in xs]
    return out


def from_dense(order: int, dim: int, f) -> SparseTensor:
    """Build a tensor by evaluating ``f(idx)`` on every index; used in tests."""
    return SparseTensor(order, dim, ((idx, f(idx)) for idx in product(range(1, dim + 1), repeat=order)))


def factorial_scale(T: SparseTensor, divisor_order: int) -> SparseTensor:
    return T.scaled(Fraction(1, math.factorial(divisor_order)))
