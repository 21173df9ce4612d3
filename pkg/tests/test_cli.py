import json
import os
import subprocess
import sys

import pytest

from lcontact_lab import cli


def run_json(capsys, *argv):
    code = cli.main(list(argv))
    out = json.loads(capsys.readouterr().out)
    return code, out


def rows(out):
    return {r["name"]: r for r in out["rows"]}


def test_mc_check_split_1_0(capsys):
    code, out = run_json(capsys, "mc-check", "--family", "split", "--p", "1", "--q", "0")
    assert code == 0 and out["aggregate"] == "pass"
    assert max(r["residual"] for r in out["rows"]) <= 1e-10
    assert all(r["residual"] <= 1e-12 for r in out["rows"] if r["name"].startswith("MC "))


def test_torsion_flat(capsys):
    code, out = run_json(capsys, "torsion", "--metric", "flat", "--fiber", "0.3+0.1i", "--samples", "5")
    assert code == 0 and out["aggregate"] == "pass"
    r = rows(out)
    for k in ("O numeric", "P numeric", "Q numeric", "O numeric vs formula", "P numeric vs formula", "Q numeric vs formula"):
        assert r[k]["residual"] <= 1e-9 and r[k]["status"] == "pass"


def test_futuretube_round_trip(capsys):
    code, out = run_json(capsys, "futuretube", "--m", "3", "--samples", "100")
    assert code == 0
    assert rows(out)["round trip"]["residual"] <= 1e-12


def test_report_schema(capsys):
    _, out = run_json(capsys, "curvature", "--metric", "sphere")
    assert set(out) == {"tool", "version", "config", "rows", "aggregate", "extras", "error"}
    for r in out["rows"]:
        assert set(r) == {"name", "status", "residual", "tolerance"}
        assert r["status"] in ("pass", "fail", "info")
        if r["status"] != "info":
            assert (r["status"] == "pass") == (r["residual"] <= r["tolerance"])
    assert out["config"]["metric"] == "sphere"


def test_printed_equations_fail_with_exit_1(capsys):
    code, out = run_json(capsys, "mc-check", "--family", "split", "--p", "2", "--q", "1", "--printed")
    assert code == 1 and out["aggregate"] == "fail"
    failing = {r["name"] for r in out["rows"] if r["status"] == "fail"}
    assert failing == {"MC d zeta0", "MC d gamma"}


def test_literal_levi_row_fails(capsys):
    code, out = run_json(capsys, "lemma-check", "--metric", "flat", "--samples", "5")
    assert code == 1
    failing = {r["name"] for r in out["rows"] if r["status"] == "fail"}
    assert failing == {"Levi = 1/2 ghat(., J.)"}
    assert rows(out)["Levi = -i ghat(., J.)"]["status"] == "pass"


@pytest.mark.parametrize("argv", [
    ["torsion", "--metric", "klein_bottle"],
    ["torsion", "--metric", "flat", "--fiber", "nonsense"],
    ["lemma-check", "--metric", "flat", "--samples", "0"],
    ["futuretube", "--m", "1"],
    ["mc-check", "--family", "split", "--p", "-1", "--q", "3"],
    ["curvature", "--metric", "sphere", "--point", "a,b,c"],
    ["curvature", "--metric", "sphere", "--point", "0,0"],
])
def test_config_errors_exit_2(capsys, argv):
    code, out = run_json(capsys, *argv)
    assert code == 2
    assert out["aggregate"] == "error" and out["error"]["type"] == "config"


def test_unreadable_metric_file(capsys, tmp_path):
    code, out = run_json(capsys, "torsion", "--metric", str(tmp_path / "missing.json"))
    assert code == 2 and "missing.json" in out["error"]["message"]


def test_json_metric_config(capsys, tmp_path):
    cfg = tmp_path / "m.json"
    cfg.write_text(json.dumps({"name": "sphere", "dim": 3}), encoding="utf-8")
    code, out = run_json(capsys, "torsion", "--metric", str(cfg), "--samples", "1")
    assert code == 0 and out["aggregate"] == "pass"


def test_output_written_atomically(capsys, tmp_path):
    target = tmp_path / "sub" / "report.json"
    code = cli.main(["futuretube", "--m", "2", "--samples", "10", "-o", str(target)])
    assert code == 0
    assert capsys.readouterr().out == ""
    assert json.loads(target.read_text(encoding="utf-8"))["aggregate"] == "pass"
    assert os.listdir(target.parent) == ["report.json"]


def test_output_to_unwritable_path(capsys, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert cli.main(["futuretube", "--m", "2", "--samples", "2", "-o", str(blocker / "r.json")]) == 2


def test_tolerance_scale(capsys, monkeypatch):
    argv = ["mc-check", "--family", "split", "--p", "2", "--q", "1", "--printed"]
    monkeypatch.setenv(cli.TOL_ENV, "1e13")
    code, out = run_json(capsys, *argv)
    assert code == 0
    assert rows(out)["Jacobi"]["tolerance"] == pytest.approx(1e-10 * 1e13)


@pytest.mark.parametrize("value", ["abc", "0", "-1", "inf", "nan"])
def test_invalid_tolerance_scale(capsys, monkeypatch, value):
    monkeypatch.setenv(cli.TOL_ENV, value)
    code, out = run_json(capsys, "futuretube", "--m", "2", "--samples", "2")
    assert code == 2 and cli.TOL_ENV in out["error"]["message"]


def test_same_seed_same_report(capsys):
    argv = ["torsion", "--metric", "sphere", "--samples", "2", "--seed", "7"]
    _, a = run_json(capsys, *argv)
    _, b = run_json(capsys, *argv)
    assert a == b
    _, c = run_json(capsys, *argv[:-1], "8")
    assert c["rows"] != a["rows"]


def test_module_entry_point(tmp_path):
    env = dict(os.environ)
    env.pop(cli.TOL_ENV, None)
    proc = subprocess.run([sys.executable, "-m", "lcontact_lab", "futuretube", "--m", "2", "--samples", "5"],
                          capture_output=True, text=True, env=env)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["tool"] == cli.TOOL


@pytest.mark.parametrize("text,value", [("0.3+0.1i", 0.3 + 0.1j), ("-0.2i", -0.2j), ("0.5", 0.5), ("1-2j", 1 - 2j)])
def test_parse_fiber(text, value):
    assert cli.parse_fiber(text) == value
