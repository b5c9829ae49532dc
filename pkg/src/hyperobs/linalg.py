"""Exact linear algebra over Q with fraction-free row reduction."""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Dict, List, Sequence, Tuple


def _int_row(row: Sequence) -> List[int]:
    den = 1
    for v in row:
        v = Fraction(v)
        den = den * v.denominator // gcd(den, v.denominator)
    out = [int(Fraction(v) * den) for v in row]
    return _primitive(out)


def _primitive(row: List[int]) -> List[int]:
    g = 0
    for v in row:
        g = gcd(g, v)
    if g > 1:
        row = [v // g for v in row]
    return row


def row_echelon(M: Sequence[Sequence]) -> Tuple[List[List[int]], List[int]]:
    """Reduced echelon form with integer rows; returns (rows, pivot columns)."""
    rows = [_int_row(r) for r in M]
    rows = [r for r in rows if any(r)]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots: List[int] = []
    done: List[List[int]] = []
    col = 0
    while rows and col < ncols:
        pick = None
        for k, r in enumerate(rows):
            if r[col]:
                if pick is None or abs(r[col]) < abs(rows[pick][col]):
                    pick = k
        if pick is None:
            col += 1
            continue
        prow = rows.pop(pick)
        if prow[col] < 0:
            prow = [-v for v in prow]
        p = prow[col]
        new_rows = []
        for r in rows:
            a = r[col]
            if a:
                g = gcd(p, a)
                r = _primitive([(p // g) * x - (a // g) * y for x, y in zip(r, prow)])
            if any(r):
                new_rows.append(r)
        rows = new_rows
        for k, r in enumerate(done):
            a = r[col]
            if a:
                g = gcd(p, a)
                done[k] = _primitive([(p // g) * x - (a // g) * y for x, y in zip(r, prow)])
        done.append(prow)
        pivots.append(col)
        col += 1
    return done, pivots


def rank(M: Sequence[Sequence]) -> int:
    if not M:
        return 0
    return len(row_echelon(M)[1])


def nullspace(M: Sequence[Sequence], ncols: int | None = None) -> List[List[Fraction]]:
    """Integer-primitive basis of {v : M v = 0}, one vector per free column.

    Each vector has a positive entry at its free column and zeros at the
    other free columns.
    """
    if ncols is None:
        ncols = len(M[0]) if M else 0
    rows, pivots = row_echelon(M) if M else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        L = 1
        for r, pc in zip(rows, pivots):
            if r[f]:
                L = L * r[pc] // gcd(L, r[pc])
        v = [0] * ncols
        v[f] = L
        for r, pc in zip(rows, pivots):
            if r[f]:
                v[pc] = -r[f] * L // r[pc]
        # the free coordinate stays positive
        v = _primitive(v)
        basis.append([Fraction(x) for x in v])
    return basis


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> List[List[Fraction]]:
    cols = list(zip(*B))
    return [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in cols] for row in A]


class SparseMatrix:
    """A rational matrix stored by rows: {row: {col: value}}."""

    __slots__ = ("shape", "rows")

    def __init__(self, shape: Tuple[int, int], entries: Dict[Tuple[int, int], Fraction] | None = None):
        self.shape = shape
        self.rows: Dict[int, Dict[int, Fraction]] = {}
        for (i, j), v in (entries or {}).items():
            if v:
                self.rows.setdefault(i, {})[j] = Fraction(v)

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows.values())

    def entries(self):
        for i, r in self.rows.items():
            for j, v in r.items():
                yield (i, j), v

    def left_multiply(self, vec: Dict[int, object]) -> Dict[int, object]:
        """Row vector times matrix; entries of vec may be Fractions or Polynomials."""
        out: Dict[int, object] = {}
        for i, c in vec.items():
            row = self.rows.get(i)
            if not row:
                continue
            for j, v in row.items():
                t = c * v
                out[j] = out[j] + t if j in out else t
        return {j: v for j, v in out.items() if v}

    def to_dense(self) -> List[List[Fraction]]:
        M = [[Fraction(0)] * self.shape[1] for _ in range(self.shape[0])]
        for (i, j), v in self.entries():
            M[i][j] = v
        return M


def kron_identity_sandwich(A: SparseMatrix, n: int, left: int, right: int) -> SparseMatrix:
    """I_{n^left} (x) A (x) I_{n^right}."""
    nl, nr = n**left, n**right
    r, c = A.shape
    out = SparseMatrix((nl * r * nr, nl * c * nr))
    for a in range(nl):
        for (i, j), v in A.entries():
            for b in range(nr):
                out.rows.setdefault((a * r + i) * nr + b, {})[(a * c + j) * nr + b] = v
    return out


def add_into(acc: SparseMatrix, B: SparseMatrix) -> None:
    for (i, j), v in B.entries():
        row = acc.rows.setdefault(i, {})
        w = row.get(j, 0) + v
        if w:
            row[j] = w
        else:
            row.pop(j, None)
