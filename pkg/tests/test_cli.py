import dataclasses
import json
import subprocess
import sys

import pytest

from trcert.certificates import dumps, from_envelope, to_envelope
from trcert.cli import main, parse_element, parse_tower


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_parse_tower_and_elements():
    t = parse_tower("Q(sqrt2)")
    assert t.degree == 2
    s2 = t.root(1)
    assert parse_element(t, "1+√2") == 1 + s2
    assert parse_element(t, "sqrt2**2 - 2") == 0
    assert parse_element(t, "(3 + 2*s1)/2") == (3 + 2 * s2) / 2
    assert parse_element(t, json.dumps((1 + s2).to_json())) == 1 + s2
    assert parse_tower("Q(sqrt2,i)").is_cm()
    z = parse_tower("Q(zeta5)")
    assert parse_element(z, "zeta5**5") == 1


def test_construct_sum32_from_json_tower(capsys):
    code, out = run(capsys, "construct", "sum32", "--tower", '{"base":["0/1","1/1"]}', "--d", "2", "--reproducible")
    assert code == 0
    env = json.loads(out)
    assert env["kind"] == "sum32" and env["status"] == {"state": "unverified"}
    assert "timestamp" not in env["provenance"]
    assert env["tower"]["steps"][0] == ["6/1"]
    cert = from_envelope(env)
    assert cert.u == 5 + 2 * cert.tower.root(1)


def test_construct_x_witness(capsys):
    code, out = run(capsys, "construct", "x-witness", "--tower", "Q(√2)", "--alpha", "√2", "--reproducible")
    assert code == 0
    env = json.loads(out)
    assert env["kind"] == "x_witness"
    assert {"sum1", "sum2"} <= set(env["payload"])


def test_construct_precondition_exit_2(capsys):
    code, out = run(capsys, "construct", "sum32", "--d", "-1")
    assert code == 2
    assert json.loads(out)["error"] == "ConjugateInForbiddenInterval"


def test_construct_parse_error_exit_3(capsys):
    code, out = run(capsys, "construct", "sum32", "--d", "2 +")
    assert code == 3
    code, out = run(capsys, "construct", "sum32", "--tower", "Q(foo)", "--d", "2")
    assert code == 3


def test_construct_not_found_exit_1(capsys):
    code, out = run(capsys, "construct", "four-squares", "--tower", "Q(sqrt2)", "--x", "2+sqrt2", "--bound", "1")
    assert code == 1 and json.loads(out)["error"] == "NotFound"


MATRIX = [
    ("unit-pair", "Q", "--d", "0"),
    ("unit-pair", "Q", "--d", "5"),
    ("unit-pair", "Q(sqrt2)", "--d", "3+2*sqrt2"),
    ("sum32", "Q", "--d", "10"),
    ("sum32", "Q(sqrt2)", "--d", "3+2*sqrt2"),
    ("x-witness", "Q(sqrt2)", "--alpha", "-3"),
    ("x-witness", "Q(sqrt2)", "--alpha", "1+sqrt2"),
    ("four-squares", "Q", "--x", "3"),
    ("four-squares", "Q(sqrt5)", "--x", "(3+sqrt5)/2"),
]


@pytest.mark.parametrize("kind, tower, flag, value", MATRIX)
def test_construct_verify_round_trip(capsys, tmp_path, kind, tower, flag, value):
    path = tmp_path / "cert.json"
    code, _ = run(capsys, "construct", kind, "--tower", tower, flag, value, "-o", str(path))
    assert code == 0
    code, out = run(capsys, "verify", str(path), "--update")
    assert code == 0 and out.rstrip().endswith("PASS")
    assert json.loads(path.read_text())["status"] == {"state": "pass"}


def test_verify_tampered_names_clause(capsys, tmp_path):
    path = tmp_path / "cert.json"
    run(capsys, "construct", "unit-pair", "--d", "2", "-o", str(path))
    cert = from_envelope(json.loads(path.read_text()))
    path.write_text(dumps(to_envelope(dataclasses.replace(cert, a=cert.a + 1))))
    code, out = run(capsys, "verify", str(path), "--json")
    assert code == 1
    rep = json.loads(out)
    assert rep["ok"] is False and rep["first_failure"] == "a = 2(2d+1)"
    code, _ = run(capsys, "verify", str(path), "--update")
    assert json.loads(path.read_text())["status"] == {"state": "fail", "clause": "a = 2(2d+1)"}


def test_verify_malformed_exit_3(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert run(capsys, "verify", str(path))[0] == 3
    path.write_text(json.dumps({"schema": "1", "kind": "sum32"}))
    assert run(capsys, "verify", str(path))[0] == 3
    assert run(capsys, "verify", str(tmp_path / "missing.json"))[0] == 3


def test_census_command(capsys):
    code, out = run(capsys, "census", "--degree", "2", "--t", "4/1", "--json")
    assert code == 0
    data = json.loads(out)
    assert len(data["entries"]) == 7 and data["element_count"] == 11
    code, out = run(capsys, "census", "--degree", "2", "--t", "4/1")
    assert "entries: 7" in out


def test_census_budget_exit_4(capsys, monkeypatch):
    monkeypatch.setenv("TRCERT_CELL_BUDGET", "10")
    code, out = run(capsys, "census", "--degree", "3", "--t", "4")
    assert code == 4
    err = json.loads(out)
    assert err["error"] == "CellBudgetExceeded" and err["needed"] > 10
    code, _ = run(capsys, "census", "--degree", "3", "--t", "4", "--budget", str(err["needed"]))
    assert code == 0


def test_kronecker_command(capsys):
    code, out = run(capsys, "kronecker", "--n", "3..12")
    assert code == 0
    rows = {int(l.split()[0]): l.split(None, 2)[2] for l in out.splitlines()}
    assert sorted(rows) == list(range(3, 13))
    assert rows[5] == "x^2 - 3*x + 1" and rows[12] == "x^2 - 4*x + 1"
    code, out = run(capsys, "kronecker", "--completeness", "2", "--json")
    assert code == 0 and json.loads(out)["ok"]
    code, out = run(capsys, "kronecker", "--n", "2")
    assert code == 2


def test_probe_mu_command(capsys):
    code, out = run(capsys, "probe-mu", "--tower", "Q(i)", "--m", "2", "--orders", "4")
    assert code == 0 and out.rstrip().endswith("PASS")
    code, out = run(capsys, "probe-mu", "--tower", "Q(zeta5)", "--m", "2", "--orders", "5", "--json")
    assert code == 0 and json.loads(out)["ok"]
    code, out = run(capsys, "probe-mu", "--tower", "Q(sqrt2)", "--m", "2", "--orders", "4")
    assert code == 1


def test_profile_command(capsys):
    code, out = run(capsys, "profile", "--degree", "1", "--ts", "1/2,3/2,5/2,9/2")
    assert code == 0
    assert out == "t,count\n1/2,0\n3/2,1\n5/2,2\n9/2,4\n"


def test_output_is_deterministic(capsys):
    for argv in (
        ["construct", "x-witness", "--tower", "Q(sqrt2)", "--alpha", "1+sqrt2", "--reproducible"],
        ["construct", "four-squares", "--tower", "Q(sqrt5)", "--x", "(3+sqrt5)/2", "--reproducible"],
        ["census", "--degree", "3", "--t", "4", "--json"],
        ["kronecker", "--n", "3..30"],
    ):
        first = run(capsys, *argv)
        second = run(capsys, *argv)
        assert first == second


def test_console_script_subprocess(tmp_path):
    path = tmp_path / "c.json"
    cmd = [sys.executable, "-m", "trcert.cli"]
    r = subprocess.run(cmd + ["construct", "sum32", "--d", "3", "-o", str(path)], capture_output=True, text=True)
    assert r.returncode == 0, r.stdout + r.stderr
    r = subprocess.run(cmd + ["verify", str(path)], capture_output=True, text=True)
    assert r.returncode == 0 and "PASS" in r.stdout
    r = subprocess.run(cmd + ["construct", "sum32", "--d", "-1"], capture_output=True, text=True)
    assert r.returncode == 2
