"""CLI surface: the documented invocations, determinism, exit codes."""

import json
import subprocess
import sys

import pytest

from btlab.cli import run


def invoke(argv):
    code, doc = run(argv)
    return code, doc


def test_criterion_standard_vertex():
    code, doc = invoke(["criterion", "--tower", "e=1,f=2", "--n", "4",
                        "--chain", "standard-vertex"])
    assert code == 0
    assert doc["in_XE"] is True


def test_criterion_edge_cases():
    code, doc = invoke(["criterion", "--tower", "e=1,f=2", "--n", "4",
                        "--chain", "d=1,3"])
    assert code == 0 and doc["in_XE"] is False
    code, doc = invoke(["tower", "criterion", "--tower", "e=1,f=2",
                        "--n", "4", "--chain", "d=2,2"])
    assert code == 0 and doc["in_XE"] is True


def test_complex_homology_single_chamber():
    code, doc = invoke(["complex", "homology", "--region", "single-chamber",
                        "--coeff", "const:1"])
    assert code == 0
    assert doc["ranks"] == [1, 0]
    assert doc["chi"] == 1


def test_complex_homology_cycle():
    code, doc = invoke(["complex", "homology", "--region", "gl4-cycle",
                        "--coeff", "const:1", "--style", "labelled"])
    assert code == 0
    assert doc["ranks"] == [1, 1]
    assert doc["chi"] == 0


def test_lefschetz_fixed_x2():
    code, doc = invoke(["lefschetz", "fixed", "--gamma", "companion:x^2-t",
                        "--radius", "2", "--q", "2"])
    assert code == 0
    assert doc["minimal"] is True
    assert doc["count"] == 1
    assert doc["fixed"][0]["dim_fixed"] == 0
    assert doc["fixed"][0]["eps"] == -1


def test_chain_invariants():
    code, doc = invoke(["chain", "--chain", "d=1,2,1", "--n", "4"])
    assert code == 0
    assert doc["d"] == [1, 2, 1] and doc["e"] == 3 and doc["p"] == 3
    code2, doc2 = invoke(["building", "invariants", "--chain", "d=2,2", "--n", "4"])
    assert code2 == 0 and doc2 == doc2 and doc2["p"] == 1


def test_decompose_preset():
    code, doc = invoke(["decompose", "--tower", "chamber-decomp-n4-f2"])
    assert code == 0
    assert doc["count"] == 2
    assert all(ch["vertices"] == 2 for ch in doc["chambers"])


def test_volume():
    code, doc = invoke(["volume", "--chain", "d=1,1", "--chain2", "d=2",
                        "--q", "2", "--n", "2"])
    assert code == 0
    assert doc["ratio"] == "1/3"


def test_lefschetz_minimal_support():
    code, doc = invoke(["lefschetz", "minimal", "--tower", "e=2,f=1",
                        "--gamma-expansion", "s", "--L", "trivial", "--q", "2"])
    assert code == 0
    assert doc["support"] is True
    assert doc["term"]["sign"] == 1


def test_determinism_byte_identical():
    args = ["complex", "homology", "--region", "random:1", "--seed", "11",
            "--n", "2", "--radius", "1"]
    out1 = json.dumps(invoke(args)[1], sort_keys=True)
    out2 = json.dumps(invoke(args)[1], sort_keys=True)
    assert out1 == out2


def test_exit_code_domain_error():
    code, doc = invoke(["criterion", "--tower", "nonsense-preset",
                        "--chain", "standard-vertex"])
    assert code == 2
    assert "error" in doc


def test_exit_code_guard():
    code, doc = invoke(["lefschetz", "fixed", "--gamma", "companion:x^2-t",
                        "--radius", "-1"])
    assert code == 2
    code, doc = invoke(["volume", "--chain", "d=1,1", "--chain2", "d=2",
                        "--q", "2", "--prec", "0"])
    assert code == 2


def test_field_command():
    code, doc = invoke(["field", "--q", "9"])
    assert code == 0
    assert doc["p"] == 3 and doc["k"] == 2
    assert doc["modulus"] == "1 + x^2"


def test_cli_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "btlab.cli", "criterion", "--tower", "e=1,f=2",
         "--n", "4", "--chain", "standard-vertex"],
        capture_output=True, text=True)
    assert out.returncode == 0
    doc = json.loads(out.stdout)
    assert doc["in_XE"] is True and doc["schema"] == "btlab/1"


def test_out_flag(tmp_path):
    path = tmp_path / "result.json"
    out = subprocess.run(
        [sys.executable, "-m", "btlab.cli", "field", "--q", "2",
         "--out", str(path)],
        capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(path.read_text())["q"] == 2
