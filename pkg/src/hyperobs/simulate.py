"""Fixed-step RK4 simulation of a hypergraph system, used to sanity-check witnesses."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .poly import Polynomial, state_vars
from .system import HypergraphSystem, lower_direct, lower_dynamics, lower_input_fields, lower_outputs

InputSignal = Union[None, Sequence[float], Callable[[float], Sequence[float]]]


class _Compiled:
    """A list of polynomials evaluated together at a float point."""

    def __init__(self, polys: Sequence[Polynomial], nvars: int):
        self.parts = []
        for p in polys:
            if p.is_zero():
                self.parts.append(None)
                continue
            E = np.array(list(p.terms.keys()), dtype=float).reshape(len(p.terms), nvars)
            c = np.array([float(v) for v in p.terms.values()])
            self.parts.append((E, c))

    def __call__(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros(len(self.parts))
        for i, part in enumerate(self.parts):
            if part is not None:
                E, c = part
                out[i] = np.prod(x[None, :] ** E, axis=1) @ c
        return out


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    outputs: np.ndarray
    completed: bool  # False when the state left the finite range before the horizon


def simulate_outputs(
    sys: HypergraphSystem,
    x0: Sequence[float],
    u: InputSignal = None,
    horizon: float = 1.0,
    step: float = 1e-3,
) -> Trajectory:
    xs = state_vars(sys.n)
    f = _Compiled(lower_dynamics(sys, xs), sys.n)
    gs = [_Compiled(g, sys.n) for g in lower_input_fields(sys, xs)]
    h = _Compiled(lower_outputs(sys, xs), sys.n)
    direct = {k: _Compiled([p], sys.n) for k, p in lower_direct(sys, xs).items()}
    m = sys.m

    def u_at(t: float) -> np.ndarray:
        if u is None or m == 0:
            return np.zeros(m)
        v = u(t) if callable(u) else u
        return np.asarray(v, dtype=float).reshape(m)

    def rhs(t: float, x: np.ndarray) -> np.ndarray:
        dx = f(x)
        uv = u_at(t)
        for j, g in enumerate(gs):
            if uv[j]:
                dx = dx + g(x) * uv[j]
        return dx

    def out(t: float, x: np.ndarray) -> np.ndarray:
        y = h(x)
        if direct:
            uv = u_at(t)
            for (i, l), d in direct.items():
                y[i - 1] += d(x)[0] * uv[l - 1]
        return y

    steps = int(round(horizon / step))
    times = np.linspace(0.0, steps * step, steps + 1)
    X = np.full((steps + 1, sys.n), np.nan)
    Y = np.full((steps + 1, sys.q), np.nan)
    x = np.asarray(x0, dtype=float).copy()
    X[0], Y[0] = x, out(0.0, x)
    completed = True
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(steps):
            t = times[k]
            k1 = rhs(t, x)
            k2 = rhs(t + step / 2, x + step / 2 * k1)
            k3 = rhs(t + step / 2, x + step / 2 * k2)
            k4 = rhs(t + step, x + step * k3)
            x = x + step / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.all(np.isfinite(x)):
                completed = False
                break
            X[k + 1], Y[k + 1] = x, out(times[k + 1], x)
    return Trajectory(times, X, Y, completed)


def output_gap(a: Trajectory, b: Trajectory) -> float:
    """Largest absolute output difference over the common finite part."""
    ok = np.isfinite(a.outputs).all(axis=1) & np.isfinite(b.outputs).all(axis=1)
    if not ok.any():
        return float("nan")
    return float(np.max(np.abs(a.outputs[ok] - b.outputs[ok])))
