"""Independent reference computations built on sympy, used only by the tests."""
from __future__ import annotations

from fractions import Fraction

import sympy

from hyperobs.poly import Polynomial


def to_sympy(p: Polynomial, syms=None):
    syms = syms or sympy.symbols(p.vars)
    return sum(
        (sympy.Rational(c.numerator, c.denominator) * sympy.Mul(*[s**k for s, k in zip(syms, e)]) for e, c in p.terms.items()),
        sympy.Integer(0),
    )


def from_sympy(expr, vars) -> Polynomial:
    syms = sympy.symbols(vars)
    P = sympy.Poly(sympy.expand(expr), *syms)
    return Polynomial({e: Fraction(int(c.p), int(c.q)) for e, c in P.terms()}, vars)


def sympy_groebner(polys, vars, order="grevlex"):
    syms = sympy.symbols(vars)
    G = sympy.groebner([to_sympy(p, syms) for p in polys], *syms, order=order)
    out = []
    for g in G.exprs:
        P = sympy.Poly(g, *syms)
        lc = P.coeffs(order=order)[0]
        out.append(from_sympy(g / lc, vars))
    return out


def sympy_lie(expr, field, syms):
    return sympy.expand(sum(sympy.diff(expr, s) * f for s, f in zip(syms, field)))


def sympy_jacobian_rank(exprs, syms, point):
    J = sympy.Matrix(exprs).jacobian(sympy.Matrix(syms))
    return J.subs(dict(zip(syms, point))).rank()
