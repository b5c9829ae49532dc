from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperobs.groebner import (
    GREVLEX,
    LEX,
    GroebnerBudgetExceeded,
    Ideal,
    MonomialOrder,
    elimination_order,
    groebner_basis,
    ideal_equal,
    is_groebner_basis,
    is_reduced_basis,
    leading_term,
    quotient_is_unit_ideal,
    radical_membership,
    reduce,
)
from hyperobs.poly import Polynomial
from oracles import sympy_groebner

XY = ("x", "y")
XYZ = ("x", "y", "z")


def v(name, vars=XY):
    return Polynomial.variable(name, vars)


@st.composite
def small_polys(draw, vars=XYZ):
    n = len(vars)
    exps = st.tuples(*[st.integers(0, 2)] * n)
    terms = draw(st.dictionaries(exps, st.integers(-3, 3), min_size=1, max_size=3))
    return Polynomial(terms, vars)


def test_reduce_example():
    x, y = v("x"), v("y")
    assert reduce(x * x * y + y, [x * y - 1]) == x + y


def test_reduce_keeps_congruence():
    x, y = v("x"), v("y")
    f = Fraction(1, 3) * x**3 * y + 2 * y**2
    G = [x * y - 1, y**2 - Fraction(1, 2)]
    r = reduce(f, G)
    assert Ideal.of(G).contains(f - r)


def test_orders():
    e1, e2 = (1, 0, 2), (0, 3, 0)
    # same degree; grevlex prefers the smaller power of the last variable
    assert GREVLEX.key(e2) > GREVLEX.key(e1)
    assert LEX.key(e1) > LEX.key(e2)
    assert MonomialOrder("grlex").key((2, 0)) > MonomialOrder("grlex").key((1, 1))
    el = elimination_order(1)
    assert el.key((1, 0, 0)) > el.key((0, 5, 5))


def test_membership_example():
    x, y = v("x"), v("y")
    I = Ideal.of([x - y, y**2 - 1])
    assert I.contains(x**2 - 1)
    assert not I.contains(x)


def test_radical_membership_example():
    x = Polynomial.variable("x", ("x",))
    I = Ideal.of([x**2])
    assert not I.contains(x)
    assert radical_membership(x, I)
    assert quotient_is_unit_ideal(I, [x])


def test_unit_ideal_and_zero():
    x, y = v("x"), v("y")
    assert groebner_basis([x, x + 1]) == [Polynomial.constant(1, XY)]
    assert Ideal.of([x * y, Polynomial.zero(XY)]).generators == (x * y,)


def test_budget_exceeded():
    x, y, z = (Polynomial.variable(c, XYZ) for c in XYZ)
    gens = [x * x * y - z, x * y * y - x + 1, y * z * z - y + x]
    with pytest.raises(GroebnerBudgetExceeded):
        groebner_basis(gens, max_reductions=5)
    assert len(groebner_basis(gens, max_reductions=50)) == 8


def test_known_basis_gives_same_result():
    x, y, z = (Polynomial.variable(c, XYZ) for c in XYZ)
    first = groebner_basis([x * y - z, y**2 - 1])
    inc = groebner_basis([x**2 - z * y], known_basis=first)
    assert inc == groebner_basis([x * y - z, y**2 - 1, x**2 - z * y])


def test_leading_term():
    p = Polynomial({(2, 0): 3, (0, 3): 1}, XY)
    assert leading_term(p, GREVLEX) == ((0, 3), 1)
    assert leading_term(p, LEX) == ((2, 0), 3)


@settings(max_examples=60)
@given(st.lists(small_polys(), min_size=1, max_size=3), st.sampled_from(["grevlex", "lex"]))
def test_basis_matches_sympy_and_passes_s_check(gens, order):
    mo = MonomialOrder(order)
    G = groebner_basis(gens, mo)
    assert is_groebner_basis(G, mo)
    assert is_reduced_basis(G, mo)
    expect = sympy_groebner(gens, XYZ, order)
    assert sorted(map(str, G)) == sorted(map(str, expect))
    for g in gens:
        assert reduce(g, G, mo).is_zero()


@settings(max_examples=40)
@given(st.lists(small_polys(), min_size=1, max_size=3), st.permutations(range(3)))
def test_basis_independent_of_generator_order(gens, perm):
    shuffled = [gens[i] for i in perm if i < len(gens)]
    assert groebner_basis(gens) == groebner_basis(shuffled)


@settings(max_examples=40)
@given(st.lists(small_polys(), min_size=1, max_size=3), small_polys())
def test_ideal_equal_after_adding_member(gens, f):
    I = Ideal.of(gens)
    member = f * gens[0]
    assert ideal_equal(I, Ideal.of(gens + [member]))
    assert I.contains(member)
