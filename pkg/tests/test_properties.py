from __future__ import annotations

import random

from hypothesis import given, settings
from hypothesis import strategies as st

import checks
from hyperobs.globalobs import build_chain
from hyperobs.groebner import is_groebner_basis
from systems import population, product_chain, rigid_body, symmetric_cubic

# a drawn seed keeps examples small; the checks do their own sampling
rngs = st.integers(0, 2**32).map(random.Random)


@settings(max_examples=100)
@given(rngs)
def test_symmetrization_keeps_the_form(rng):
    assert checks.symmetrization_case(rng)


@settings(max_examples=25)
@given(rngs)
def test_path_sums_equal_lie_derivatives(rng):
    assert checks.path_sum_case(rng)


@settings(max_examples=25)
@given(rngs)
def test_factored_matrices_equal_jacobians(rng):
    assert checks.matrix_case(rng)


@settings(max_examples=25)
@given(rngs, st.booleans())
def test_linear_systems_follow_kalman(rng, observable):
    assert checks.linear_case(rng, observable)


@settings(max_examples=50)
@given(rngs)
def test_buchberger_output_passes_s_check(rng):
    assert checks.buchberger_case(rng)


def test_chain_bases_pass_s_check():
    for sys in (symmetric_cubic(), population(), rigid_body(), product_chain(), product_chain(True)):
        for G in build_chain(sys).bases:
            assert is_groebner_basis(G)


def test_chain_equality_persists_one_more_level():
    for sys in (symmetric_cubic(), population(), rigid_body(), product_chain()):
        ch = build_chain(sys, two_step=True)
        assert ch.equal_steps[-2:] == [True, True]
