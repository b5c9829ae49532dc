"""Example systems shared by the tests, built directly from tensors."""
from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from pathlib import Path

from hyperobs.system import HypergraphSystem, normalized
from hyperobs.tensor import SparseTensor

SYSTEMS_DIR = Path(__file__).resolve().parent.parent / "systems"
PERMS = list(permutations((1, 2, 3)))


def population() -> HypergraphSystem:
    A2 = SparseTensor(2, 3, {(1, 1): 1, (2, 2): 1, (3, 3): 1})
    A3 = SparseTensor(3, 3, {(1, 2, 1): -4, (2, 3, 2): -1, (2, 3, 3): -1})
    A4 = SparseTensor(4, 3, {(1, 2, 3, 3): -1})
    return HypergraphSystem(3, (A2, A3, A4), (), ((SparseTensor(1, 3, {(2,): 1}),),))


def symmetric_cubic() -> HypergraphSystem:
    """x' = (x2 x3 + x2, x1 x3 + x1, x1 x2), y = x1 x2 x3 + x1 x2 from unit raw weights."""
    A3 = SparseTensor(3, 3, {p: 1 for p in PERMS})
    A2 = SparseTensor(2, 3, {(1, 2): 1, (2, 1): 1})
    C3 = SparseTensor(3, 3, {p: 1 for p in PERMS})
    C2 = SparseTensor(2, 3, {(1, 2): 1, (2, 1): 1})
    return normalized(HypergraphSystem(3, (A3, A2), (), ((C3, C2),)))


def rigid_body(with_output: bool = True) -> HypergraphSystem:
    A3 = SparseTensor(3, 3, {(2, 3, 1): Fraction(-1, 2), (1, 3, 2): 1, (1, 2, 3): Fraction(-1, 2)})
    outs = ((SparseTensor(2, 3, {(1, 1): 1, (2, 2): 1, (3, 3): 1}),),) if with_output else ()
    return HypergraphSystem(3, (A3,), (), outs)


def product_chain(second_output: bool = False) -> HypergraphSystem:
    A3 = SparseTensor(3, 3, {(1, 2, 3): 1})
    outs = [(SparseTensor(1, 3, {(3,): 1}),)]
    if second_output:
        outs.append((SparseTensor(1, 3, {(1,): 1}),))
    return HypergraphSystem(3, (A3,), (), tuple(outs))
