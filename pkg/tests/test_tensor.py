from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperobs.poly import state_vars
from hyperobs.system import tensor_field, tensor_form
from hyperobs.tensor import (
    SparseTensor,
    TensorError,
    circ_contract,
    contract_full,
    contract_vector_power,
    kron_power,
    mixed_radix,
    slot_contract,
    symmetrize,
    unfold,
)


@st.composite
def tensors(draw, order=None, dim=None):
    n = dim or draw(st.integers(1, 3))
    k = order or draw(st.integers(1, 4))
    idx = st.tuples(*[st.integers(1, n)] * k)
    entries = draw(st.dictionaries(idx, st.integers(-5, 5), max_size=6))
    return SparseTensor(k, n, entries)


rationals = st.fractions(min_value=-3, max_value=3, max_denominator=5)


def test_head_tail_convention():
    A = SparseTensor(3, 3, {(1, 2, 3): 2})
    assert contract_vector_power(A, [1, 1, 1]) == [0, 0, 2]
    assert contract_vector_power(A, [3, 5, 7]) == [0, 0, 30]


def test_zero_weights_are_not_stored():
    T = SparseTensor(2, 2, {(1, 2): 1})
    T.add((1, 2), -1)
    assert T.nnz() == 0 and T.is_zero()


def test_index_validation():
    with pytest.raises(TensorError):
        SparseTensor(2, 2, {(1, 3): 1})
    with pytest.raises(TensorError):
        SparseTensor(2, 2, {(1,): 1})
    with pytest.raises(TensorError):
        SparseTensor(1, 2, {(1,): 0.5})


def test_symmetrize_example():
    S = symmetrize(SparseTensor(2, 2, {(1, 2): 1}))
    assert S[(1, 2)] == S[(2, 1)] == Fraction(1, 2)
    assert S.is_symmetric()


def test_unfold_example():
    U = unfold(SparseTensor(3, 2, {(1, 2, 1): 5}))
    # tail 1 is row 0; heads (1, 2) sit at column (1-1)*2 + (2-1) = 1
    assert U == {(0, 1): 5}


def test_circ_contract_example():
    X = SparseTensor(2, 2, {(1, 2): 1})
    Y = SparseTensor(2, 2, {(2, 2): 3})
    Z = circ_contract(X, Y)
    assert Z.order == 2 and dict(Z.items()) == {(1, 2): 3}


def test_slot_contract_examples():
    C = SparseTensor(1, 3, {(3,): 1})
    A = SparseTensor(3, 3, {(1, 2, 3): 1})
    R = slot_contract(C, A, 1)
    assert R.order == 2 and dict(R.items()) == {(1, 2): 1}
    assert slot_contract(C, SparseTensor(2, 3, {(1, 2): 1}), 1).is_zero()


@given(tensors(), st.data())
def test_symmetrize_preserves_forms(T, data):
    x = data.draw(st.lists(rationals, min_size=T.dim, max_size=T.dim))
    assert contract_full(symmetrize(T), x) == contract_full(T, x)
    assert symmetrize(symmetrize(T)) == symmetrize(T)


@given(tensors(), st.data())
def test_unfold_matches_contraction(T, data):
    x = data.draw(st.lists(rationals, min_size=T.dim, max_size=T.dim))
    U = unfold(T)
    kp = kron_power(x, T.order - 1)
    via = [Fraction(0)] * T.dim
    for (i, j), v in U.items():
        via[i] += v * kp[j]
    assert via == contract_vector_power(T, x)


@given(tensors(), st.data())
def test_kron_power_positions(T, data):
    x = data.draw(st.lists(rationals, min_size=T.dim, max_size=T.dim))
    kp = kron_power(x, T.order)
    for idx, _ in T.items():
        v = Fraction(1)
        for i in idx:
            v *= x[i - 1]
        assert kp[mixed_radix(idx, T.dim)] == v


@given(st.integers(1, 3), st.data())
def test_slot_contract_sums_to_lie_derivative(n, data):
    from hyperobs.poly import lie_derivative

    C = data.draw(tensors(dim=n, order=data.draw(st.integers(1, 3))))
    A = data.draw(tensors(dim=n, order=data.draw(st.integers(2, 3))))
    xs = state_vars(n)
    total = sum((tensor_form(slot_contract(C, A, s), xs) for s in range(1, C.order + 1)), tensor_form(SparseTensor(1, n), xs))
    assert total == lie_derivative(tensor_form(C, xs), tensor_field(A, xs), xs)


@given(st.integers(1, 3), st.data())
def test_circ_contract_gives_gradient_product(n, data):
    from hyperobs.poly import lie_derivative

    k = data.draw(st.integers(1, 3))
    C = symmetrize(data.draw(tensors(dim=n, order=k)))
    A = data.draw(tensors(dim=n, order=data.draw(st.integers(2, 3))))
    if k + A.order - 2 < 1:
        return
    xs = state_vars(n)
    lhs = lie_derivative(tensor_form(C, xs), tensor_field(A, xs), xs)
    assert lhs == tensor_form(circ_contract(C, A), xs) * k
