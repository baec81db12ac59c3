import csv
import io
import json
import subprocess
import sys

import pytest

from coopjam import cli
from coopjam.errors import ConvergenceError
from coopjam.model import load_instance, paper_instance, save_instance

COMMANDS = ["paper-example", "optimize", "sweep-z", "sweep-snr", "random-trials", "validate", "gen-instance"]


def run(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_paper_example(capsys):
    code, out, err = run(capsys, "paper-example")
    assert code == 0
    values = dict(line.split("=") for line in out.splitlines())
    assert float(values["R1"]) == pytest.approx(0.6332, abs=5e-4)
    assert float(values["R2"]) == pytest.approx(0.6439, abs=2e-3)
    assert float(values["z_star"]) == pytest.approx(0.0091, abs=0.01)
    assert err.startswith("# ")


def test_sweep_z_rows(capsys):
    code, out, _ = run(capsys, "sweep-z", "--points", "51", "--z-hi", "0.5")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 51
    assert list(rows[0]) == ["x", "r1_bits", "r2_bits", "z_star", "evaluations"]


def test_sweep_snr_and_trials(capsys):
    code, out, err = run(capsys, "sweep-snr", "--points", "3")
    assert code == 0 and len(out.splitlines()) == 4
    assert "mean=" in err
    code, out, _ = run(capsys, "random-trials", "--trials", "3", "--seed", "5")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert all(float(r["r2_bits"]) >= float(r["r1_bits"]) - 1e-9 for r in rows)


def test_optimize_json(capsys):
    code, out, _ = run(capsys, "optimize")
    doc = json.loads(out)
    assert code == 0
    assert doc["r2_bits"] == pytest.approx(0.6439, abs=2e-3)
    assert len(doc["covariances"]) == 5
    assert doc["duality_gap"] <= 1e-6 * (1 + doc["f_value"])


def test_gen_instance_round_trip(capsys, tmp_path):
    path = tmp_path / "inst.json"
    code, _, _ = run(capsys, "gen-instance", "--relays", "3", "--seed", "8", "--out", str(path))
    assert code == 0
    inst = load_instance(path)
    assert inst.n == 3
    code, out, _ = run(capsys, "paper-example", "--instance", str(path))
    assert code == 0 and "R2=" in out


def test_instance_file_used(capsys, tmp_path):
    path = tmp_path / "paper.json"
    save_instance(paper_instance(), path)
    _, from_file, _ = run(capsys, "paper-example", "--instance", str(path))
    _, builtin, _ = run(capsys, "paper-example")
    assert from_file == builtin


def test_validate_small(capsys):
    code, out, _ = run(capsys, "validate", "--seeds", "2")
    assert code == 0
    assert len(out.splitlines()) == 5
    assert all(line.startswith("PASS") for line in out.splitlines())


def test_validate_failure_exit(capsys, monkeypatch):
    from coopjam.validation import SuiteResult

    monkeypatch.setattr(cli.validation, "run_all", lambda **kw: [SuiteResult("x", False, -1.0, 1)])
    code, out, _ = run(capsys, "validate")
    assert code == cli.EXIT_VALIDATION and out.startswith("FAIL")


@pytest.mark.parametrize(
    "argv",
    [["bogus"], [], ["sweep-z", "--points", "abc"], ["sweep-z", "--points", "1"], ["optimize", "--jobs", "0"]],
)
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == cli.EXIT_USAGE
    assert "usage" in err


def test_bad_sweep_range(capsys):
    code, _, err = run(capsys, "sweep-z", "--z-lo", "1", "--z-hi", "0.5")
    assert code == cli.EXIT_USAGE


def test_missing_instance_file(capsys, tmp_path):
    code, _, err = run(capsys, "optimize", "--instance", str(tmp_path / "none.json"))
    assert code == cli.EXIT_IO


def test_malformed_instance_file(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"h0": [1, 0], "relays": []}')
    code, _, err = run(capsys, "optimize", "--instance", str(path))
    assert code == cli.EXIT_IO and "g0" in err


def test_convergence_exit(capsys, monkeypatch):
    def boom(*a, **k):
        raise ConvergenceError("stuck", z=0.5, bracket=(-1.0, 1.0))

    monkeypatch.setattr(cli, "optimize", boom)
    code, _, err = run(capsys, "paper-example")
    assert code == cli.EXIT_CONVERGENCE
    assert "z=0.5" in err and "(-1.0, 1.0)" in err


@pytest.mark.parametrize("command", COMMANDS)
def test_help(command):
    res = subprocess.run([sys.executable, "-m", "coopjam", command, "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "--seed" in res.stdout and "--out" in res.stdout


def test_byte_identical_runs():
    argv = [sys.executable, "-m", "coopjam", "random-trials", "--trials", "4", "--seed", "11"]
    first = subprocess.run(argv, capture_output=True).stdout
    second = subprocess.run(argv, capture_output=True).stdout
    parallel = subprocess.run(argv + ["--jobs", "2"], capture_output=True).stdout
    assert first == second == parallel
    assert first.count(b"\n") == 5
