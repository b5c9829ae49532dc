from __future__ import annotations

import numpy as np

from hyperobs.globalobs import build_chain, decide_global
from hyperobs.simulate import output_gap, simulate_outputs
from hyperobs.system import DirectTerm, HypergraphSystem
from hyperobs.tensor import SparseTensor
from systems import population, symmetric_cubic


def test_witness_trajectories_coincide():
    sys = symmetric_cubic()
    res = decide_global(build_chain(sys), [1, 1, 1])
    a = simulate_outputs(sys, [1, 1, 1], horizon=0.5, step=1e-3)
    b = simulate_outputs(sys, [float(v) for v in res.witness], horizon=0.5, step=1e-3)
    assert a.completed and b.completed
    assert output_gap(a, b) <= 1e-6


def test_finite_escape_is_reported():
    # the cubic system blows up before t = 1 from (1, 1, 1)
    a = simulate_outputs(symmetric_cubic(), [1, 1, 1], horizon=1.0, step=1e-3)
    assert not a.completed
    assert np.isnan(a.outputs[-1]).all()


def test_distinguishable_states_separate():
    a = simulate_outputs(population(), [1, 1, 1], horizon=2.0, step=1e-3)
    b = simulate_outputs(population(), [1.1, 1, 1], horizon=2.0, step=1e-3)
    assert output_gap(a, b) > 1e-2


def test_linear_decay_accuracy():
    sys = HypergraphSystem(1, (SparseTensor(2, 1, {(1, 1): -1}),), (), ((SparseTensor(1, 1, {(1,): 1}),),))
    tr = simulate_outputs(sys, [1.0], horizon=1.0, step=1e-2)
    assert abs(tr.outputs[-1, 0] - np.exp(-1.0)) < 1e-8


def test_inputs_and_feedthrough():
    # x' = u, y = x + x u with constant u = 3
    sys = HypergraphSystem(
        1,
        (),
        ((SparseTensor(1, 1, {(1,): 1}),),),
        ((SparseTensor(1, 1, {(1,): 1}),),),
        (DirectTerm(1, 1, SparseTensor(1, 1, {(1,): 1})),),
    )
    tr = simulate_outputs(sys, [0.0], u=[3.0], horizon=1.0, step=1e-2)
    assert abs(tr.states[-1, 0] - 3.0) < 1e-12
    assert abs(tr.outputs[-1, 0] - 12.0) < 1e-12
    timed = simulate_outputs(sys, [0.0], u=lambda t: [2 * t], horizon=1.0, step=1e-2)
    assert abs(timed.states[-1, 0] - 1.0) < 1e-12
