import json
import shutil
import subprocess

import numpy as np
import pytest

from todakit.cli import main


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


@pytest.fixture
def g1_json(tmp_path):
    return write(tmp_path, "g1.json", {"genus": 1, "x": [2.0], "u": [3.0]})


def run(*args):
    return main([str(a) for a in args])


def test_validate_g1(g1_json, tmp_path):
    out = tmp_path / "v"
    assert run("validate", "--input", g1_json, "--output", out) == 0
    rep = json.loads((out / "validate.json").read_text())
    assert rep["passed"] and set(rep["identities"]) >= {"res3", "res4", "res5", "res6"}


def test_flow_g1(g1_json, tmp_path):
    out = tmp_path / "f"
    assert run("flow", "--input", g1_json, "--output", out, "--path", "2:2.5:0.01") == 0
    last = (out / "trajectory.csv").read_text().strip().split("\n")[-1].split(",")
    assert abs(float(last[2]) - 3.5) < 1e-6


def test_flow_collision_exit_1(g1_json, tmp_path):
    out = tmp_path / "c"
    assert run("flow", "--input", g1_json, "--output", out, "--path", "2:0.5:0.1") == 1
    err = json.loads((out / "error.json").read_text())
    assert err["error"] == "FlowStopped"
    assert len((out / "trajectory.csv").read_text().strip().split("\n")) > 2


@pytest.mark.parametrize("cmd,files", [
    ("periods", ["periods.json"]),
    ("equilibrium", ["equilibrium.json"]),
    ("pell", ["certificate.json"]),
    ("toda", ["lattice.csv", "lattice.json"]),
    ("schlesinger", ["schlesinger.json", "schlesinger_check.json"]),
])
def test_commands_write_artifacts(g1_json, tmp_path, cmd, files):
    out = tmp_path / cmd
    assert run(cmd, "--input", g1_json, "--output", out, "--N", "2") == 0
    for f in files:
        assert (out / f).exists()


def test_pell_certificate(g1_json, tmp_path):
    assert run("pell", "--input", g1_json, "--output", tmp_path / "p", "--N", 2, "--k", "1,1") == 0
    cert = json.loads((tmp_path / "p" / "certificate.json").read_text())
    assert np.allclose(cert["P"], [1, -3, 1], atol=1e-9) and cert["signature"] == [0, 0]


def test_pell_not_rational_exit_1(tmp_path):
    src = write(tmp_path, "g2.json", {"genus": 2, "x": [2.0, 4.0], "u": [3.0, 5.5]})
    assert run("pell", "--input", src, "--output", tmp_path / "o") == 1
    assert json.loads((tmp_path / "o" / "error.json").read_text())["error"] == "NotRational"


@pytest.mark.parametrize("data", [
    {"genus": 1, "x": [3.0], "u": [2.0]},
    {"genus": 1, "x": [1.0], "u": [3.0]},
    {"genus": 2, "x": [2.0], "u": [3.0]},
    {"genus": 1, "x": ["a"], "u": [3.0]},
    {"x": [2.0]},
])
def test_input_errors_exit_2(tmp_path, data):
    src = write(tmp_path, "bad.json", data)
    assert run("periods", "--input", src, "--output", tmp_path / "o") == 2
    assert "error" in json.loads((tmp_path / "o" / "error.json").read_text())


def test_missing_file_and_bad_args(tmp_path, g1_json):
    assert run("periods", "--input", tmp_path / "nope.json", "--output", tmp_path / "o") == 2
    assert run("bogus", "--input", g1_json, "--output", tmp_path / "o") == 2
    assert run("flow", "--input", g1_json, "--output", tmp_path / "o") == 2
    assert run("periods", "--input", g1_json, "--output", tmp_path / "o", "--tol", "zzz=1") == 2


def test_tolerance_override_can_fail(g1_json, tmp_path, monkeypatch):
    assert run("pell", "--input", g1_json, "--output", tmp_path / "a", "--tol", "pell=1e-30") == 1
    monkeypatch.setenv("TODAKIT_TOL_SCALE", "1e-20")
    assert run("pell", "--input", g1_json, "--output", tmp_path / "b") == 1
    monkeypatch.setenv("TODAKIT_TOL_SCALE", "1")
    assert run("pell", "--input", g1_json, "--output", tmp_path / "c") == 0


def test_sw_deform_genus0(tmp_path):
    src = write(tmp_path, "g0.json", {"genus": 0, "x": [], "u": []})
    assert run("sw-deform", "--input", src, "--output", tmp_path / "o", "--N", 2) == 0
    rep = json.loads((tmp_path / "o" / "sw_deform.json").read_text())
    assert rep["samples"] == [] and "no nontrivial deformation" in rep["note"]


def test_sw_deform_counts_double_zeros(tmp_path):
    src = write(tmp_path, "c.json", {"genus": 1, "x": [2.0], "u": [3 + 2 * np.sqrt(2)]})
    out = tmp_path / "o"
    assert run("sw-deform", "--input", src, "--output", out, "--N", 3,
               "--path", "2:2.2:0.05") == 0
    rep = json.loads((out / "sw_deform.json").read_text())
    assert rep["expected_double_zeros"] == 1 and rep["double_zero_count_constant"]
    assert len(rep["samples"]) == 5
    assert all(s["signature"] == [0, 1] for s in rep["samples"])


def test_deterministic_artifacts(g1_json, tmp_path):
    for d in ("a", "b"):
        assert run("toda", "--input", g1_json, "--output", tmp_path / d, "--N", 2,
                   "--jobs", 2 if d == "b" else 1) == 0
    for f in ("lattice.csv", "lattice.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


@pytest.mark.skipif(shutil.which("todakit") is None, reason="console script not installed")
def test_console_script(g1_json, tmp_path):
    r = subprocess.run(["todakit", "equilibrium", "--input", g1_json,
                        "--output", str(tmp_path / "e")], capture_output=True)
    assert r.returncode == 0
    rep = json.loads((tmp_path / "e" / "equilibrium.json").read_text())
    assert rep["rational"] == {"N": 2, "k": [1, 1]}


def test_negative_ranges(g1_json, tmp_path):
    out = tmp_path / "t"
    assert run("toda", "--input", g1_json, "--output", out, "--n", "-2:1", "--t", "0:0.2:0.1") == 0
    rows = (out / "lattice.csv").read_text().strip().split("\n")
    assert len(rows) == 1 + 4 * 3 and rows[1].startswith("-2,0.0,")
