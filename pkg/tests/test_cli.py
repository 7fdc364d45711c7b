from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

import pytest

from einstein_obs.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_default_output_is_json(capsys):
    c, out, _ = run(capsys, "obstruct", "--mode", "closed", "--chi", "12", "--tau", "-8")
    d = json.loads(out)
    assert c == EXIT_OK and d["status"] == "EqualityRigidity" and "K3" in d["rigidity_note"]


def test_catalog_text(capsys):
    c, out, _ = run(capsys, "catalog", "--format", "text")
    assert c == EXIT_OK and "taub-nut" in out


def test_catalog(capsys):
    code, out, _ = run(capsys, "catalog", "--format", "json")
    assert code == EXIT_OK
    names = [m["name"] for m in json.loads(out)["metrics"]]
    assert "taub-nut" in names


@pytest.mark.parametrize("argv, status, code", [
    (["--mode", "closed", "--chi", "12", "--tau", "-8"], "EqualityRigidity", EXIT_OK),
    (["--mode", "closed", "--chi", "12", "--tau", "-9"], "Violated", EXIT_FAIL),
    (["--mode", "closed", "--chi", "11", "--tau", "-1"], "Satisfied", EXIT_OK),
    (["--mode", "fibered", "--chi", "1", "--tau", "0", "--euler", "1"], "EqualityRigidity", EXIT_OK),
    (["--mode", "fibered", "--chi", "6", "--tau", "-5", "--euler", "1"], "Violated", EXIT_FAIL),
    (["--mode", "fibered", "--chi", "1", "--tau", "0", "--half-eta=-2/3"], "EqualityRigidity", EXIT_OK),
    (["--mode", "cone", "--chi", "1", "--tau", "0", "--volume-over-2pi2", "1", "--eta", "0",
      "--alpha", "0"], "EqualityRigidity", EXIT_OK),
    (["--mode", "nakajima", "--chi", "2", "--tau", "-1", "--gamma-order", "2", "--eta-s", "0"],
     "EqualityRigidity", EXIT_OK),
    (["--mode", "kotschick", "--chi", "0", "--tau", "0", "--lambda", "0"], "EqualityRigidity", EXIT_OK),
    (["--mode", "anderson", "--chi", "1", "--tau", "0", "--renormalized-volume", "0", "--eta", "0"],
     "Satisfied", EXIT_OK),
])
def test_obstruct(capsys, argv, status, code):
    c, out, _ = run(capsys, "obstruct", "--format", "json", *argv)
    assert c == code
    assert json.loads(out)["status"] == status


def test_obstruct_flip_and_convention(capsys):
    c, out, _ = run(capsys, "obstruct", "--mode", "fibered", "--chi", "5", "--tau", "-4", "--euler", "1",
                    "--eta-sign", "theorem", "--format", "json")
    assert c == EXIT_FAIL and json.loads(out)["alternate"]["status"] == "EqualityRigidity"
    c, out, _ = run(capsys, "obstruct", "--mode", "fibered", "--chi", "5", "--tau", "-4", "--euler", "1",
                    "--orientation", "flipped", "--format", "text")
    assert c == EXIT_OK and out.startswith("EqualityRigidity")


@pytest.mark.parametrize("argv", [
    ["obstruct", "--mode", "cone", "--chi", "1", "--tau", "0"],
    ["obstruct", "--mode", "closed", "--chi", "1.5", "--tau", "0"],
    ["obstruct", "--mode", "fibered", "--chi", "1", "--tau", "0"],
    ["obstruct", "--mode", "fibered", "--chi", "1", "--tau", "0", "--euler", "1/2"],
    ["obstruct", "--mode", "closed", "--chi", "x", "--tau", "0"],
    ["obstruct", "--mode", "bogus", "--chi", "1", "--tau", "0"],
    ["verify", "no-such-metric"],
    ["verify", "taub-nut", "--rmax", "0.5"],
    ["sweep", "eguchi-hanson"],
    ["blowup-scan", "eguchi-hanson"],
    ["verify", "taub-nut", "--manifest", "/nonexistent.ini"],
    [],
])
def test_usage_errors(capsys, argv):
    with_exit = None
    try:
        code = main(argv)
    except SystemExit as exc:
        with_exit = exc.code
        code = with_exit
    assert code == EXIT_USAGE


def test_verify_json(capsys):
    c, out, err = run(capsys, "verify", "taub-nut", "--rmax", "1e4", "--format", "json")
    assert c == EXIT_OK
    d = json.loads(out)
    assert d["passed"] is True and d["signature"]["pinned"] == ["theorem"]
    assert "warning" in err
    c, out, err = run(capsys, "verify", "taub-nut", "--eta-sign", "theorem", "--format", "text")
    assert c == EXIT_OK and "pinned theorem" in out and err == ""


def test_verify_failure_exit(capsys, tmp_path):
    p = tmp_path / "m.ini"
    p.write_text("[metric:wrong]\nkind = taub_nut\nchi = 3\ntau = 0\n")
    c, out, _ = run(capsys, "verify", "wrong", "--manifest", str(p), "--format", "text")
    assert c == EXIT_FAIL and "FAIL" in out
    c, out, _ = run(capsys, "verify", "wrong", "--manifest", str(p))
    assert c == EXIT_FAIL and json.loads(out)["passed"] is False


def test_sweep_csv(capsys, tmp_path):
    dest = tmp_path / "s.csv"
    c, _, err = run(capsys, "sweep", "taub-nut", "--eps", "0.02", "0.01", "0.005", "0.0025",
                    "--output", str(dest))
    assert c == EXIT_OK and "slopes" in err
    rows = list(csv.DictReader(io.StringIO(dest.read_text())))
    assert [float(r["epsilon"]) for r in rows] == [0.02, 0.01, 0.005, 0.0025]
    c, out, _ = run(capsys, "sweep", "cusp-model-t2", "--eps", "0.1", "0.01", "0.001")
    assert out.splitlines()[0] == "epsilon,cs_euler,cs_signature,error"


def test_alpha_and_blowup(capsys):
    c, out, _ = run(capsys, "alpha", "--quotient", "3", "--format", "json")
    d = json.loads(out)
    assert c == EXIT_OK and Fraction(d["volume_over_2pi2"]) == Fraction(1, 3)
    c, out, _ = run(capsys, "blowup-scan", "taub-nut", "--format", "json")
    assert json.loads(out)["min_k"] == "5"
    c, out, _ = run(capsys, "blowup-scan", "taub-nut", "--eta-sign", "theorem", "--format", "json")
    assert json.loads(out)["min_k"] == "1"
