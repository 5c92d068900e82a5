import json
import os
import subprocess
import sys

import pytest

from qwboost import _backend
from qwboost.cli import main


@pytest.fixture(autouse=True)
def restore_backend():
    prev = _backend.kernels
    yield
    _backend.kernels = prev


def test_simulate_writes_csv(tmp_path, capsys):
    out = tmp_path / "run.csv"
    code = main(["simulate", "--family", "complete", "--n", "64", "--steps", "10",
                 "--record-basis", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t,p_position,p_boosted,ab,ba,bb"
    assert len(lines) == 12
    assert "boosted=" in capsys.readouterr().err


def test_simulate_is_byte_deterministic(tmp_path):
    paths = []
    for i, backend in enumerate(["numpy", "numpy", *_backend.available()]):
        p = tmp_path / f"r{i}.csv"
        assert main(["--backend", backend, "simulate", "--family", "hypercube", "--n", "6",
                     "--steps", "12", "--record-basis", "--out", str(p)]) == 0
        paths.append(p)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_simulate_auto_steps(tmp_path, capsys):
    out = tmp_path / "auto.csv"
    assert main(["simulate", "--family", "complete", "--n", "256", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 1 + 1 + 18
    assert "t=18" in capsys.readouterr().err


def test_simulate_auto_needs_assumptions(capsys):
    code = main(["simulate", "--family", "complete", "--n", "16", "--marked", "0,1"])
    assert code == 2
    assert "auto" in capsys.readouterr().err


@pytest.mark.parametrize("steps", ["0", "-3", "many"])
def test_simulate_bad_steps(steps):
    assert main(["simulate", "--family", "complete", "--n", "16", "--steps", steps]) == 2


def test_config_errors(tmp_path):
    assert main(["simulate", "--family", "torus", "--steps", "3"]) == 2
    assert main(["simulate", "--family", "complete", "--steps", "3"]) == 2
    assert main(["simulate", "--family", "complete", "--n", "2", "--steps", "3"]) == 2
    assert main(["reduce", "--family", "complete", "--n", "8", "--marked", "9"]) == 2
    assert main(["reduce", "--family", "complete", "--n", "8", "--marked", "antipodal"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--family", "ring", "--n", "5"])
    assert exc.value.code == 2


def test_custom_graph(tmp_path, capsys):
    good = tmp_path / "c4.txt"
    good.write_text("4 2\n1 3\n0 2\n1 3\n0 2\n")
    assert main(["reduce", "--family", "custom", "--graph-file", str(good)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["graph"]["N"] == 4
    bad = tmp_path / "bad.txt"
    bad.write_text("3 2\n1 2\n0\n0\n")
    assert main(["reduce", "--family", "custom", "--graph-file", str(bad)]) == 2
    assert main(["reduce", "--family", "custom", "--graph-file", str(tmp_path / "missing")]) == 5
    assert main(["reduce", "--family", "custom"]) == 2


def test_unwritable_output(tmp_path):
    target = tmp_path / "nodir" / "x.json"
    assert main(["reduce", "--family", "complete", "--n", "8", "--out", str(target)]) == 5


def test_reduce_torus_column(capsys):
    assert main(["reduce", "--family", "torus", "--dim", "2", "--side", "8"]) == 0
    rep = json.loads(capsys.readouterr().out)
    U = rep["U"]
    basis = U["basis"]
    j = basis.index("ba")
    col = {basis[i]: row[j][0] for i, row in enumerate(U["matrix"]) if abs(row[j][0]) > 1e-15}
    assert col == pytest.approx({"ab": -0.5, "cb": 2 ** -0.5, "db": 0.5}, abs=1e-12)
    assert rep["doubling_assumptions"]["holds"]


def test_spectrum_complete(capsys):
    assert main(["spectrum", "--family", "complete", "--n", "1024"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["spectrum"]["closed_form"]["phase_residual"] <= 1e-10
    assert rep["perturbation"]["rounded_runtime"] == 36


def test_check_doubling(capsys):
    assert main(["check-doubling", "--family", "torus", "--sizes", "8,16,32"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["verdict"] == "Violated"
    assert main(["check-doubling", "--family", "hypercube", "--sizes", "6,8,10", "--marked", "antipodal"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["verdict"] == "Satisfied"
    assert main(["check-doubling", "--family", "all"]) == 0
    reps = json.loads(capsys.readouterr().out)
    assert [r["verdict"] for r in reps] == ["Satisfied"] * 3 + ["Violated", "Satisfied"]
    assert main(["check-doubling", "--family", "complete", "--sizes", ","]) == 2
    assert main(["check-doubling", "--family", "complete", "--sizes", "a,b"]) == 2


def test_module_entry_point(tmp_path):
    env = dict(os.environ, QWBOOST_BACKEND="numpy")
    res = subprocess.run([sys.executable, "-m", "qwboost", "check-doubling", "--family", "complete",
                          "--sizes", "8,16"], capture_output=True, text=True, env=env, check=False)
    assert res.returncode == 0
    assert [e["ratio"] for e in json.loads(res.stdout)["entries"]] == ["2/7", "2/15"]
