from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperobs.globalobs import lie_levels
from hyperobs.sysfile import (
    SystemFile,
    SystemFileError,
    dumps_system,
    load_system,
    loads_system,
    parse_weight,
    system_from_dict,
    system_to_dict,
)
from hyperobs.system import DirectTerm, HypergraphSystem, lower_dynamics, lower_outputs
from hyperobs.tensor import SparseTensor
from systems import SYSTEMS_DIR, population, symmetric_cubic

weights = st.fractions(min_value=-5, max_value=5, max_denominator=6).filter(bool)


@st.composite
def tensors(draw, n, min_order=1):
    k = draw(st.integers(min_order, 3))
    idx = st.tuples(*[st.integers(1, n)] * k)
    return SparseTensor(k, n, draw(st.dictionaries(idx, weights, max_size=4)))


@st.composite
def system_files(draw):
    n = draw(st.integers(1, 3))
    dyn = tuple(draw(st.lists(tensors(n), max_size=2)))
    inputs = tuple(tuple(draw(st.lists(tensors(n), min_size=1, max_size=2))) for _ in range(draw(st.integers(0, 1))))
    outs = tuple(tuple(draw(st.lists(tensors(n), min_size=1, max_size=2))) for _ in range(draw(st.integers(1, 2))))
    direct = ()
    if draw(st.booleans()):
        direct = (DirectTerm(1, 1, draw(tensors(n))),)
    sigma = draw(st.none() | st.lists(weights, min_size=n, max_size=n))
    sys = HypergraphSystem(n, dyn, inputs, outs, direct)
    return SystemFile(sys, draw(st.booleans()), sigma, {"d_max": 2, "p": 1} if draw(st.booleans()) else {})


@settings(max_examples=60)
@given(system_files())
def test_round_trip(sf):
    text = dumps_system(sf)
    back = loads_system(text)
    assert back.system == sf.system
    assert back.normalize_weights == sf.normalize_weights
    assert back.sigma == sf.sigma and back.design == sf.design
    assert dumps_system(back) == text


def test_shipped_files_load():
    pop = load_system(str(SYSTEMS_DIR / "population.json")).effective()
    assert lower_dynamics(pop) == lower_dynamics(population())
    assert lower_outputs(pop) == lower_outputs(population())
    cub = load_system(str(SYSTEMS_DIR / "symmetric_cubic.json"))
    assert cub.normalize_weights
    assert lie_levels(cub.effective(), 2) == lie_levels(symmetric_cubic(), 2)
    for path in sorted(SYSTEMS_DIR.glob("*.json")):
        load_system(str(path))


def test_float_weights_refused():
    data = {"n": 1, "dynamics": [{"order": 2, "entries": [{"idx": [1, 1], "w": 0.5}]}]}
    with pytest.raises(SystemFileError) as err:
        system_from_dict(data)
    assert err.value.where.startswith("dynamics/0/entries/0/w")
    with pytest.raises(ValueError):
        parse_weight(0.5)


def test_fraction_strings():
    assert parse_weight(" -3 / 4 ") == Fraction(-3, 4)
    assert parse_weight(7) == 7


@pytest.mark.parametrize(
    "data, where",
    [
        ({"n": 0}, "n"),
        ({"n": 2, "dynamics": [{"order": 2, "entries": [{"idx": [1, 3], "w": 1}]}]}, "dynamics/0/entries/0/idx"),
        ({"n": 2, "dynamics": [{"order": 3, "entries": [{"idx": [1, 2], "w": 1}]}]}, "dynamics/0/entries/0/idx"),
        ({"n": 2, "outputs": [[{"order": 1, "entries": [{"idx": [1], "w": "1/0"}]}]]}, "outputs/0/0/entries/0/w"),
        ({"n": 2, "sigma": [1]}, "sigma"),
        ({"n": 2, "labels": ["a"]}, "labels"),
        ({"n": 2, "extra": 1}, "<root>"),
        ({"n": 2, "outputs": [], "direct": [{"output": 1, "input": 1, "order": 1, "entries": []}]}, "direct/0/output"),
    ],
)
def test_errors_name_the_field(data, where):
    with pytest.raises(SystemFileError) as err:
        system_from_dict(data)
    assert err.value.where == where


def test_json_syntax_error_has_position():
    with pytest.raises(SystemFileError) as err:
        loads_system('{"n": 2,\n  "dynamics": [}')
    assert err.value.where.startswith("line 2 column")


def test_serialised_form_is_canonical():
    d = system_to_dict(SystemFile(population()))
    assert d["schema"] == "hyperobs.system/1"
    assert all(isinstance(e["w"], str) for T in d["dynamics"] for e in T["entries"])
    assert json.loads(dumps_system(SystemFile(population()))) == d
