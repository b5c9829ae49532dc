"""Exact multivariate polynomials over Q with named variables.

A polynomial lives in an explicit ordered variable space; exponent tuples
follow that order. Arithmetic between different spaces is refused, use
``embed`` to move a polynomial into a larger space first.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

Exponent = Tuple[int, ...]
Coeff = Union[int, Fraction]


class VariableSpaceError(ValueError):
    pass


def _frac(c) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


class Polynomial:
    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, terms: Mapping[Exponent, Coeff] | Iterable = (), vars: Sequence[str] = ()):
        self.vars: Tuple[str, ...] = tuple(vars)
        if len(set(self.vars)) != len(self.vars):
            raise VariableSpaceError(f"duplicate variable names in {self.vars}")
        t: Dict[Exponent, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        nv = len(self.vars)
        for e, c in items:
            e = tuple(e)
            if len(e) != nv:
                raise VariableSpaceError(f"exponent {e} does not fit variables {self.vars}")
            c = _frac(c)
            v = t.get(e, 0) + c
            if v:
                t[e] = v
            else:
                t.pop(e, None)
        self.terms = t
        self._hash = None

    # constructors
    @classmethod
    def _raw(cls, terms: Dict[Exponent, Fraction], vars: Tuple[str, ...]) -> "Polynomial":
        p = cls.__new__(cls)
        p.vars = vars
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, vars: Sequence[str]) -> "Polynomial":
        return cls._raw({}, tuple(vars))

    @classmethod
    def constant(cls, c: Coeff, vars: Sequence[str]) -> "Polynomial":
        vars = tuple(vars)
        c = _frac(c)
        return cls._raw({(0,) * len(vars): c} if c else {}, vars)

    @classmethod
    def variable(cls, name: str, vars: Sequence[str]) -> "Polynomial":
        vars = tuple(vars)
        if name not in vars:
            raise VariableSpaceError(f"{name!r} not in {vars}")
        e = [0] * len(vars)
        e[vars.index(name)] = 1
        return cls._raw({tuple(e): Fraction(1)}, vars)

    @classmethod
    def monomial(cls, exp: Exponent, vars: Sequence[str], c: Coeff = 1) -> "Polynomial":
        return cls({tuple(exp): c}, vars)

    # basic queries
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, name: str) -> int:
        i = self.vars.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def support_vars(self) -> Tuple[str, ...]:
        used = set()
        for e in self.terms:
            used.update(i for i, k in enumerate(e) if k)
        return tuple(self.vars[i] for i in sorted(used))

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_term() == other
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self.terms.items())))
        return self._hash

    # arithmetic
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.vars != self.vars:
                raise VariableSpaceError(f"variable spaces differ: {self.vars} vs {other.vars}")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(other, self.vars)
        raise TypeError(f"cannot combine Polynomial with {type(other).__name__}")

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            v = t.get(e, 0) + c
            if v:
                t[e] = v
            else:
                t.pop(e, None)
        return Polynomial._raw(t, self.vars)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw({e: -c for e, c in self.terms.items()}, self.vars)

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            c = _frac(other)
            if not c:
                return Polynomial.zero(self.vars)
            return Polynomial._raw({e: v * c for e, v in self.terms.items()}, self.vars)
        other = self._coerce(other)
        t: Dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = t.get(e, 0) + c1 * c2
                if v:
                    t[e] = v
                else:
                    t.pop(e, None)
        return Polynomial._raw(t, self.vars)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power")
        out = Polynomial.constant(1, self.vars)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def mul_term(self, exp: Exponent, c: Coeff) -> "Polynomial":
        c = _frac(c)
        if not c:
            return Polynomial.zero(self.vars)
        return Polynomial._raw(
            {tuple(a + b for a, b in zip(e, exp)): v * c for e, v in self.terms.items()}, self.vars
        )

    # calculus and substitution
    def diff(self, name: str) -> "Polynomial":
        i = self.vars.index(name)
        t: Dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                e2 = e[:i] + (k - 1,) + e[i + 1 :]
                t[e2] = c * k
        return Polynomial._raw(t, self.vars)

    def evaluate(self, point: Mapping[str, Coeff] | Sequence[Coeff]) -> Fraction:
        """Exact value at a point given for every variable (sequence or name map)."""
        if isinstance(point, Mapping):
            vals = [_frac(point[v]) for v in self.vars]
        else:
            if len(point) != len(self.vars):
                raise VariableSpaceError("point length does not match variable count")
            vals = [_frac(v) for v in point]
        total = Fraction(0)
        for e, c in self.terms.items():
            t = c
            for v, k in zip(vals, e):
                if k:
                    t *= v**k
            total += t
        return total

    def evaluate_float(self, vals: Sequence[float]) -> float:
        total = 0.0
        for e, c in self.terms.items():
            t = float(c)
            for v, k in zip(vals, e):
                if k:
                    t *= v**k
            total += t
        return total

    def substitute(self, mapping: Mapping[str, Union[Coeff, "Polynomial"]]) -> "Polynomial":
        """Replace variables by constants or polynomials of the same space."""
        idx = {self.vars.index(k): v for k, v in mapping.items()}
        out = Polynomial.zero(self.vars)
        pow_cache: Dict[Tuple[int, int], Union[Fraction, Polynomial]] = {}

        def power(i, k):
            key = (i, k)
            if key not in pow_cache:
                v = idx[i]
                pow_cache[key] = (_frac(v) ** k) if not isinstance(v, Polynomial) else v**k
            return pow_cache[key]

        for e, c in self.terms.items():
            keep = tuple(0 if i in idx else k for i, k in enumerate(e))
            term = Polynomial._raw({keep: c}, self.vars)
            for i, k in enumerate(e):
                if k and i in idx:
                    term = term * power(i, k)
            out = out + term
        return out

    def embed(self, new_vars: Sequence[str]) -> "Polynomial":
        """Move into a space containing all variables this polynomial uses."""
        new_vars = tuple(new_vars)
        pos = {v: i for i, v in enumerate(new_vars)}
        used = self.support_vars()
        for v in used:
            if v not in pos:
                raise VariableSpaceError(f"variable {v!r} missing from target space")
        m = len(new_vars)
        t = {}
        for e, c in self.terms.items():
            ne = [0] * m
            for i, k in enumerate(e):
                if k:
                    ne[pos[self.vars[i]]] = k
            t[tuple(ne)] = c
        return Polynomial._raw(t, new_vars)

    def rename(self, mapping: Mapping[str, str], new_vars: Sequence[str] | None = None) -> "Polynomial":
        names = [mapping.get(v, v) for v in self.vars]
        p = Polynomial._raw(dict(self.terms), tuple(names))
        return p if new_vars is None else p.embed(new_vars)

    # printing
    def sorted_terms(self):
        """Terms in descending graded reverse lexicographic order."""
        return sorted(self.terms.items(), key=lambda ec: (sum(ec[0]), tuple(-k for k in reversed(ec[0]))), reverse=True)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k)
            if not mono:
                s = str(c)
            elif c == 1:
                s = mono
            elif c == -1:
                s = "-" + mono
            else:
                a = abs(c)
                body = f"{a}*{mono}" if a.denominator == 1 else f"({a})*{mono}"
                s = "-" + body if c < 0 else body
            parts.append(s)
        out = parts[0]
        for s in parts[1:]:
            out += " - " + s[1:] if s.startswith("-") else " + " + s
        return out

    def __repr__(self) -> str:
        return f"Polynomial({self}, vars={self.vars})"


def state_vars(n: int, prefix: str = "x") -> Tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(1, n + 1))


def pair_vars(n: int) -> Tuple[str, ...]:
    """Variable space for the pair of initial conditions: xi_1..xi_n, eta_1..eta_n."""
    return state_vars(n, "xi") + state_vars(n, "eta")


def lie_derivative(v: Polynomial, f: Sequence[Polynomial], xvars: Sequence[str] | None = None) -> Polynomial:
    """L_f v = sum_i (dv/dx_i) f_i, with x the first len(f) variables unless given."""
    xvars = tuple(xvars) if xvars is not None else v.vars[: len(f)]
    if len(xvars) != len(f):
        raise VariableSpaceError("field length does not match state variables")
    out = Polynomial.zero(v.vars)
    for name, fi in zip(xvars, f):
        if fi.vars != v.vars:
            raise VariableSpaceError("field and function live in different spaces")
        d = v.diff(name)
        if d:
            out = out + d * fi
    return out


def to_xi_eta(p: Polynomial, n: int) -> Tuple[Polynomial, Polynomial]:
    """Copies of a state polynomial in xi and in eta, both in the pair space."""
    xs = state_vars(n)
    pv = pair_vars(n)
    q = p.embed(xs) if p.vars != xs else p
    xi = q.rename({f"x{i}": f"xi{i}" for i in range(1, n + 1)}, pv)
    eta = q.rename({f"x{i}": f"eta{i}" for i in range(1, n + 1)}, pv)
    return xi, eta


def to_xi(p: Polynomial, n: int) -> Polynomial:
    q = p.embed(state_vars(n)) if p.vars != state_vars(n) else p
    return q.rename({f"x{i}": f"xi{i}" for i in range(1, n + 1)})
