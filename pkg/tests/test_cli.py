from __future__ import annotations

import json
import subprocess
import sys

import pytest

from hyperobs.cli import main
from systems import SYSTEMS_DIR


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def f(name):
    return SYSTEMS_DIR / name


def test_global_population(capsys):
    code, out, _ = run(capsys, "global", f("population.json"), "--sigma", "1,1,1", "--sigma", "0,0,0")
    assert code == 0
    rep = json.loads(out)
    assert rep["schema"] == "hyperobs.report/1" and rep["command"] == "global"
    verdicts = [d["verdict"] for d in rep["result"]["decisions"]]
    assert verdicts == ["Observable", "Unobservable"]
    assert rep["result"]["chain"]["N"] == 2


def test_global_output_is_byte_identical(capsys):
    args = ("global", f("symmetric_cubic.json"), "--sigma", "1,1,1")
    first = run(capsys, *args)[1]
    assert first == run(capsys, *args)[1]


def test_jobs_give_same_report(capsys):
    args = ("global", f("population.json"), "--sigma", "1,1,1", "--sigma", "2,3,5", "--sigma", "0,0,0")
    serial = run(capsys, *args)[1]
    parallel = run(capsys, *args, "--jobs", "2")[1]
    assert serial == parallel


def test_budget_exhaustion_exits_one(capsys):
    code, out, _ = run(capsys, "global", f("symmetric_cubic.json"), "--sigma", "1,1,1", "--budget", "1")
    assert code == 1
    assert "resource limit" in out


def test_usage_errors_exit_two(capsys, tmp_path):
    assert run(capsys, "global", f("population.json"), "--sigma", "1,1")[0] == 2
    assert run(capsys, "global", tmp_path / "missing.json", "--sigma", "1")[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 1, "dynamics": [{"order": 2, "entries": [{"idx": [1, 1], "w": 0.5}]}]}')
    code, _, err = run(capsys, "chain", bad)
    assert code == 2 and "dynamics/0/entries/0/w" in err


def test_sigma_from_file(capsys):
    code, out, _ = run(capsys, "design", f("rigid_body_design.json"))
    assert code == 0
    res = json.loads(out)["result"]
    assert res["designed_outputs"] == ["x1^2 + x2^2 + x3^2"] and res["sigma"] == ["0", "0", "0"]


def test_design_failure_exits_one(capsys):
    code, out, _ = run(capsys, "design", f("product_chain.json"), "--p", "1", "--sigma", "1,1,1")
    assert code == 1 and json.loads(out)["result"]["success"] is False


def test_structural_and_local(capsys):
    code, out, _ = run(capsys, "structural", f("product_chain.json"))
    res = json.loads(out)["result"]
    assert code == 0 and not res["certified"] and res["nontrivial_automorphisms"][0]["cycles"] == [[1, 2]]
    code, out, _ = run(capsys, "local", f("population.json"), "--point", "1,0,1")
    res = json.loads(out)["result"]
    assert code == 0 and res["rank"] == 1 and res["vanishing_conditions"] == ["x3", "(x2)^3"]


def test_chain_text_format(capsys):
    code, out, _ = run(capsys, "chain", f("population.json"), "--format", "text")
    assert code == 0 and "N: 2" in out


def test_simulate_compare(capsys):
    code, out, _ = run(capsys, "simulate", f("symmetric_cubic.json"), "--x0", "1,1,1", "--compare=-1,-1,1", "--horizon", "0.5")
    res = json.loads(out)["result"]
    assert code == 0 and res["completed"] and res["max_output_gap"] <= 1e-6


@pytest.mark.slow
def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hyperobs", "chain", str(f("population.json"))], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["result"]["N"] == 2
