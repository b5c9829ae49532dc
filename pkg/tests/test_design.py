from __future__ import annotations

from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from hyperobs.design import (
    DesignConfig,
    design_outputs,
    exact_nullspace,
    greedy_cover,
    kernel_polynomial,
    monomial_basis,
    select_candidate,
    vanishing_constraint_matrix,
)
from hyperobs.globalobs import Verdict
from hyperobs.poly import Polynomial, lie_derivative, state_vars
from hyperobs.system import HypergraphSystem, lower_dynamics
from hyperobs.tensor import SparseTensor
from systems import product_chain, rigid_body

XS = state_vars(3)


def test_monomial_basis_order():
    assert monomial_basis(3, 2) == [
        (1, 0, 0), (0, 1, 0), (0, 0, 1),
        (2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2),
    ]


def test_rigid_body_kernels():
    f = lower_dynamics(rigid_body(False))
    M1, _ = vanishing_constraint_matrix(f, monomial_basis(3, 1))
    assert exact_nullspace(M1, 3) == []
    basis = monomial_basis(3, 2)
    M2, _ = vanishing_constraint_matrix(f, basis)
    K = exact_nullspace(M2, len(basis))
    assert len(K) == 2
    for v in K:
        assert lie_derivative(kernel_polynomial(v, basis, XS), f).is_zero()


def test_rigid_body_design_gives_sphere():
    res = design_outputs(rigid_body(False), DesignConfig(d_max=2, p=1))
    assert res.success and res.degree == 2 and res.relaxed_order == 1
    y = res.outputs[0]
    assert str(y) == "x1^2 + x2^2 + x3^2"
    assert res.verdict.verdict is Verdict.OBSERVABLE


def test_existing_output_with_extra_sensor():
    res = design_outputs(product_chain(), DesignConfig(d_max=2, p=2), [1, 1, 1])
    assert res.success
    assert [str(h) for h in res.all_outputs] == ["x3", "x1"]


def test_no_budget_left():
    res = design_outputs(product_chain(), DesignConfig(d_max=2, p=1), [1, 1, 1])
    assert not res.success and res.outputs == []


def test_zero_dynamics_need_every_coordinate():
    res = design_outputs(HypergraphSystem(3), DesignConfig(d_max=1, p=3))
    assert res.success and [str(h) for h in res.outputs] == ["x1", "x2", "x3"]


def test_relaxation_to_second_derivative():
    # x1' = x2: only x2 is constant, x1 + x2 has vanishing second derivative
    sys = HypergraphSystem(2, (SparseTensor(2, 2, {(2, 1): 1}),))
    res = design_outputs(sys, DesignConfig(d_max=1, p=1), [1, 1])
    assert res.success and res.relaxed_order == 2
    assert [str(h) for h in res.outputs] == ["x1 + x2"]
    fail = design_outputs(sys, DesignConfig(d_max=1, p=1, r_relax=1), [1, 1])
    assert not fail.success


def test_selection_prefers_coverage_then_sparsity():
    basis = monomial_basis(3, 1)
    K = [[Fraction(1), 0, 0], [Fraction(1), Fraction(1), 0], [0, Fraction(2), Fraction(1)]]
    assert select_candidate(K, basis) == 1
    assert select_candidate(K, basis, covered={1, 2}) == 0
    assert greedy_cover(K, basis, 3) == [1, 2]


@settings(max_examples=30)
@given(
    st.dictionaries(
        st.tuples(st.integers(1, 3), st.integers(1, 3), st.integers(1, 3)), st.integers(-3, 3), min_size=1, max_size=4
    ),
    st.integers(1, 2),
)
def test_kernel_vectors_vanish_along_the_field(entries, d):
    f = lower_dynamics(HypergraphSystem(3, (SparseTensor(3, 3, entries),)))
    basis = monomial_basis(3, d)
    M, _ = vanishing_constraint_matrix(f, basis)
    for v in exact_nullspace(M, len(basis)):
        assert any(v)
        assert lie_derivative(kernel_polynomial(v, basis, XS), f).is_zero()


def test_kernel_polynomial_skips_zero_coefficients():
    p = kernel_polynomial([0, Fraction(2), 0], monomial_basis(3, 1), XS)
    assert p == 2 * Polynomial.variable("x2", XS)
