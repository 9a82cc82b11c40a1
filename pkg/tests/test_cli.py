import io
import json

import numpy as np
import pytest

from schottky4 import cli, theta


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_picard_text():
    code, out, _ = run("picard", "--space", "voronoi")
    assert code == 0
    assert out == "J = 8L - D - 4E\ndiv F = 8L\n"
    code, out, _ = run("picard", "--format", "json")
    assert json.loads(out)["J"] == "8L - D"


def test_lattice_coeffs_csv_deterministic():
    a = run("lattice", "coeffs", "--genus", "2", "--max-diag", "4", "--format", "csv")
    b = run("lattice", "coeffs", "--genus", "2", "--max-diag", "4", "--format", "csv")
    assert a == b and a[0] == 0
    lines = a[1].splitlines()
    assert lines[0] == "t11,t12,t21,t22,N_E8+E8,N_D16+,difference"
    assert all(line.endswith(",0") for line in lines[1:])


def test_lattice_coeffs_json():
    code, out, _ = run("lattice", "coeffs", "--genus", "1")
    obj = json.loads(out)
    assert code == 0 and obj["all_differences_zero"] and obj["max_diag"] == 8


def test_witness():
    code, out, _ = run("lattice", "witness")
    obj = json.loads(out)
    assert code == 0 and obj["difference"] == 5160960 and obj["trace"] == 8


def test_theta_eval_point_file(tmp_path):
    p = tmp_path / "tau.json"
    p.write_text(json.dumps(theta.SiegelPoint(1j * np.eye(1)).to_json()))
    code, out, _ = run("theta", "eval", "--point", str(p), "--char", "0:0", "--tol", "1e-12")
    assert code == 0
    re, im = json.loads(out)["values"]["[0;0]"]
    assert abs(re - 1.0864348112133080) < 1e-12 and abs(im) < 1e-15


def test_schottky_eval_report_keys():
    a = run("schottky", "eval", "--seed", "3")
    assert a == run("schottky", "eval", "--seed", "3")
    obj = json.loads(a[1])
    assert set(obj) == {"tau", "F_lattice", "F_theta", "indicator", "cutoff", "tol"}
    assert obj["indicator"] > 1e-3


def test_relation_command():
    code, out, _ = run("schottky", "relation", "--points", "5", "--seed", "7")
    assert code == 0 and json.loads(out)["max_residual"] < 1e-8


def test_jacobian_genus1():
    code, out, _ = run("jacobian", "test", "--branch=-2,-1,1,2")
    obj = json.loads(out)
    assert code == 0 and abs(obj["tau"]["im"][0][0] - 1.5634019226961116) < 1e-10


def test_exit_codes(tmp_path):
    assert run("bogus")[0] == 1
    assert run("lattice", "coeffs", "--nope")[0] == 1
    assert run("jacobian", "test", "--branch", "0,0,1,2")[0] == 2
    assert run("picard", "--tol", "5")[0] == 2
    assert run("lattice", "coeffs", "--max-diag", "3")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"g": 1, "re": [0], "im": [-1]}))
    assert run("schottky", "eval", "--point", str(bad))[0] == 2
    assert run("theta", "eval", "--point", str(tmp_path / "missing.json"))[0] == 2
    (tmp_path / "junk.json").write_text("not json")
    assert run("theta", "eval", "--point", str(tmp_path / "junk.json"))[0] == 2
    code, out, err = run("jacobian", "test", "--branch", ",".join(map(str, range(10))))
    assert code == 3 and "resource error" in err
    assert json.loads(out)["indicator"] is None


def test_out_file(tmp_path):
    p = tmp_path / "o.txt"
    code, out, _ = run("picard", "--out", str(p))
    assert code == 0 and out == "" and p.read_text().startswith("J = ")
