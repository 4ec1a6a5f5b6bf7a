import csv
import io
import json
import math
import subprocess
import sys

import pytest

from jacobispec import jacobi
from jacobispec.cli import UsageError, main, parse_grid, parse_ints, parse_model


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# --------------------------------------------------------------------------
# model grammar


def test_parse_model_examples():
    assert isinstance(parse_model("free"), jacobi.FreeModel)
    per = parse_model("periodic:a=1,1;b=1,-1")
    assert isinstance(per, jacobi.PeriodicModel) and per.period == 2
    assert per.arrays(4)[1][1:].tolist() == [1, -1, 1, -1]
    qp = parse_model("qp:lambda=3,alpha=golden,theta=0")
    assert isinstance(qp, jacobi.QuasiPeriodicModel) and qp.lam == 3.0
    assert parse_model("quasiperiodic:lambda=1,alpha=0.3").coeffs(1) == qp.__class__(1.0, 0.3).coeffs(1)
    rnd = parse_model("random:seed=4,a=0.5:1.5,b=-2:2")
    assert rnd.arrays(10)[1].tolist() == jacobi.RandomModel(4, (0.5, 1.5), (-2, 2)).arrays(10)[1].tolist()
    tab = parse_model("table:a=0.5,2;b=0,1")
    assert tab.coeffs(3) == (1.0, 0.0)
    assert parse_model(json.dumps(per.to_dict())).arrays(6)[1].tolist() == per.arrays(6)[1].tolist()


@pytest.mark.parametrize("bad", ["", "periodic:a=1", "qp:theta=0", "random:seed=x", "banana", "periodic:a=1;b=1,2"])
def test_parse_model_rejects(bad):
    with pytest.raises(UsageError, match="model grammar"):
        parse_model(bad)


def test_parse_helpers():
    assert parse_grid("default", [1]) == [1]
    assert parse_grid("0:1:3", None) == [0.0, 0.5, 1.0]
    assert parse_grid("0,1;2,0.5", None) == [1j, 2 + 0.5j]
    assert parse_ints("500,1000") == [500, 1000]
    for bad in ("1000,500", "0", "a"):
        with pytest.raises(UsageError):
            parse_ints(bad)


# --------------------------------------------------------------------------
# commands and exit codes


def test_dos_command(tmp_path, capsys):
    out = tmp_path / "dk.csv"
    cdf_out = tmp_path / "k.csv"
    code, stdout, _ = run(capsys, "dos", "--model", "free", "--N", "1000", "--out", str(out), "--cdf-out", str(cdf_out))
    assert code == 0
    rows = list(csv.reader(open(out)))
    assert rows[0] == ["lambda", "weight"] and len(rows) == 1001
    assert rows[1][1] == "0.001"
    assert float(rows[1][0]) == pytest.approx(-2 * math.cos(math.pi / 1001), abs=1e-10)
    assert json.loads(stdout)["A"] == 1.0
    k = list(csv.reader(open(cdf_out)))
    assert k[0] == ["t", "k"] and float(k[-1][1]) == pytest.approx(1.0)


def test_thouless_check(capsys):
    code, out, _ = run(capsys, "thouless-check", "--model", "free", "--N", "500", "--grid", "default")
    doc = json.loads(out)
    assert code == 0 and doc["passed"] and doc["max_relative"] <= 1e-9 and len(doc["rows"]) == 10


def test_equilibrium_command(capsys):
    code, out, _ = run(capsys, "equilibrium", "--set", "[-2,-1],[1,2]", "--nodes", "48")
    assert code == 0
    assert json.loads(out)["capacity"] == pytest.approx(0.86603, abs=1e-5)


@pytest.mark.parametrize(
    "argv",
    [
        ["capacity", "--set", "[0,1]"],
        ["lyapunov", "--N", "100", "--grid", "2.5:3:3"],
        ["identities", "--N", "50,100", "--grid", "0,1"],
        ["w-pair", "--N", "200", "--z", "0,1"],
        ["reflectionless", "--set", "[-2,-1],[1,2]", "--function", "atom", "--x", "0", "--points", "5"],
        ["krein", "--xi", '{"breaks": [0], "values": [0, 1]}', "--z", "0,1", "--x", "1"],
        ["pointmass", "--set", "[-2,-1],[1,2]", "--x", "0"],
        ["inequalities", "--N", "500", "--Z", "[-2,2]", "--K", "[-2,2]"],
        ["dap-check", "--N", "20000", "--x", "3"],
    ],
)
def test_commands_succeed(argv, capsys):
    code, out, _ = run(capsys, *argv)
    assert code == 0, out
    assert out.strip()


def test_krein_and_pointmass_content(capsys):
    _, out, _ = run(capsys, "krein", "--xi", '{"breaks": [], "values": [0.5]}', "--c", "0", "--z", "0,1")
    assert json.loads(out)["G"] == pytest.approx([0.0, 1.0], abs=1e-10)
    _, out, _ = run(capsys, "pointmass", "--set", "[-2,2]", "--x", "0")
    assert json.loads(out)["possible"] is False
    _, out, _ = run(capsys, "pointmass", "--set", "[-2,-1],[1,2]", "--x", "0")
    assert json.loads(out)["point_mass"] > 1e-3


def test_failed_check_exits_1(capsys):
    code, out, _ = run(capsys, "inequalities", "--N", "200", "--Z", "[-1,1]", "--K", "[-1,1]")
    assert code == 1 and json.loads(out)["passed"] is False


def test_numeric_failure_exits_1_with_report(capsys):
    code, out, _ = run(capsys, "w-pair", "--z", "1,0")
    doc = json.loads(out)
    assert code == 1 and doc["type"] == "ValueError" and "Im z" in doc["error"]


@pytest.mark.parametrize(
    "argv",
    [
        ["dos", "--model", "banana"],
        ["dos", "--N", "0"],
        ["thouless-check", "--tol", "-1"],
        ["equilibrium"],
        ["equilibrium", "--set", "[1"],
        ["lyapunov", "--grid", "1:2:x"],
        ["identities", "--N", "1000,500"],
        ["krein", "--xi", "{}"],
        ["reflectionless", "--set", "[0,1]", "--function", "atom"],
        ["nonsense"],
        [],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err


def test_bad_model_prints_grammar(capsys):
    _, _, err = run(capsys, "dos", "--model", "banana")
    assert "model grammar" in err


# --------------------------------------------------------------------------
# config files, determinism, formatting


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"command": "thouless-check", "model": "periodic:a=1,1;b=1,-1", "N": 200}))
    code, out, _ = run(capsys, "--config", str(cfg))
    assert code == 0 and json.loads(out)["N"] == 200
    cfg.write_text(json.dumps({"model": "free"}))
    assert run(capsys, "--config", str(cfg))[0] == 2
    assert run(capsys, "--config", str(tmp_path / "missing.json"))[0] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["lyapunov", "--model", "random:seed=11", "--N", "300", "--grid=-3:3:41"],
        ["thouless-check", "--model", "random:seed=5,a=0.5:1.5", "--N", "200"],
        ["dos", "--model", "qp:lambda=2,alpha=golden,theta=0.1", "--N", "100"],
    ],
)
def test_deterministic_across_threads(argv, capsys):
    outs = []
    for threads in ("1", "4", "1"):
        code, out, _ = run(capsys, *argv, "--threads", threads)
        assert code == 0
        outs.append(out.encode())
    assert outs[0] == outs[1] == outs[2]


def test_csv_format(capsys):
    _, out, _ = run(capsys, "lyapunov", "--N", "50", "--grid", "3:3:1")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["x", "gamma"]
    assert rows[1][1] == f"{float(rows[1][1]):.15g}"
    assert len(rows[1][1].replace("-", "").replace(".", "").lstrip("0")) <= 15


def test_json_sorted_keys(capsys):
    _, out, _ = run(capsys, "capacity", "--set", "[0,1]")
    doc = json.loads(out)
    assert list(doc) == sorted(doc)
    assert out == json.dumps(doc, sort_keys=True, indent=2) + "\n"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "jacobispec", "capacity", "--set", "[-2,2]"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and json.loads(res.stdout)["capacity"] == 1.0
