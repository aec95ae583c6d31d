import dataclasses
import json
import subprocess
import sys

import numpy as np
import pytest

from densecode.analysis import SweepResult
from densecode.capacity import capacity_bell_two_sided_dep2
from densecode.channels import PauliSpec, depolarizing_spec
from densecode.cli import main
from densecode.qops import bell_density


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_capacity_bell_crossing(capsys):
    code, out, _ = run(capsys, "capacity", "--state", "bell", "--channel", "one-sided-dep", "--d", "2", "--p", "0.252")
    assert code == 0
    obj = json.loads(out)
    assert set(obj) == {"value_bits", "avg_state_entropy_bits", "channel_output_entropy_bits", "condition_residual"}
    assert round(obj["value_bits"], 2) == 1.0


def test_capacity_noiseless_two_sided(capsys):
    code, out, _ = run(capsys, "capacity", "--state", "bell", "--channel", "two-sided-dep", "--p", "0")
    assert code == 0 and json.loads(out)["value_bits"] == 2.0


def test_capacity_werner_and_schmidt(capsys):
    code, out, _ = run(capsys, "capacity", "--state", "werner", "--eta", "0.5", "--p", "0.2")
    assert code == 0 and json.loads(out)["value_bits"] > 0
    code, out, _ = run(capsys, "capacity", "--state", "schmidt", "--alpha", "0.3", "--channel", "two-sided-dep", "--p", "0.4")
    assert code == 0


def test_twelve_significant_digits(capsys):
    _, out, _ = run(capsys, "capacity", "--p", "0.3")
    val = json.loads(out)["value_bits"]
    assert len(repr(val).replace("0.", "", 1).lstrip("0")) <= 12


def test_threshold(capsys):
    code, out, _ = run(capsys, "threshold")
    obj = json.loads(out)
    assert code == 0
    assert 0.344 <= obj["threshold_alpha"]["root"] <= 0.346
    assert 0.251 <= obj["classical_limit_crossing"]["root"] <= 0.253


def test_threshold_csv(capsys):
    code, out, _ = run(capsys, "threshold", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0].startswith("name,root") and len(lines) == 3


@pytest.mark.parametrize("figure", ["3", "4", "5"])
def test_sweep_csv_parses(capsys, figure):
    code, out, _ = run(capsys, "sweep", "--figure", figure, "--points", "11", "--format", "csv")
    assert code == 0
    res = SweepResult.from_csv(out)
    assert len(res.grid) == 11 and res.parameter_name == "p"


def test_sweep_json_to_file(tmp_path, capsys):
    path = tmp_path / "fig4.json"
    code, out, _ = run(capsys, "sweep", "--figure", "4", "--points", "5", "--output", str(path))
    assert code == 0 and out == ""
    obj = json.loads(path.read_text())
    assert set(obj) == {"parameter_name", "grid", "series"}


def test_pauli_spec_file(tmp_path, capsys):
    path = tmp_path / "q.json"
    path.write_text(depolarizing_spec(2, 0.3).to_json())
    code, out, _ = run(capsys, "capacity", "--channel", "one-sided-pauli", "--spec-path", str(path))
    assert code == 0
    assert json.loads(out)["value_bits"] == pytest.approx(0.874190608325, abs=1e-11)
    code, _, _ = run(capsys, "capacity", "--channel", "two-sided-pauli", "--spec-path", str(path))
    assert code == 0


def test_state_file(tmp_path, capsys):
    rho = bell_density(2).mat
    path = tmp_path / "rho.json"
    path.write_text(json.dumps({"dims": [2, 2], "real": rho.real.tolist(), "imag": rho.imag.tolist()}))
    code, out, _ = run(capsys, "capacity", "--state", "file", "--state-path", str(path), "--channel", "two-sided-dep", "--p", "0.2")
    assert code == 0
    assert json.loads(out)["value_bits"] == pytest.approx(capacity_bell_two_sided_dep2(0.2), abs=1e-11)


@pytest.mark.parametrize(
    "argv",
    [
        ["capacity", "--p", "1.5"],
        ["capacity", "--alpha", "-0.2", "--state", "schmidt"],
        ["capacity", "--d", "1"],
        ["capacity", "--channel", "one-sided-pauli"],
        ["capacity", "--state", "file"],
        ["capacity", "--state", "schmidt", "--d", "3"],
        ["capacity", "--channel", "one-sided-pauli", "--spec-path", "/nonexistent/q.json"],
        ["optimize", "--ensemble-size", "2"],
    ],
)
def test_invalid_config_gives_error_object(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code != 0 and out == ""
    obj = json.loads(err.strip().splitlines()[-1])
    assert {"error", "message"} <= set(obj)


def test_condition_violation_reported(tmp_path, capsys):
    path = tmp_path / "q.json"
    path.write_text(PauliSpec(2, np.array([[0.7, 0.3], [0.0, 0.0]])).to_json())
    code, out, err = run(
        capsys, "capacity", "--state", "schmidt", "--alpha", "0.2", "--channel", "one-sided-pauli", "--spec-path", str(path)
    )
    assert code != 0
    obj = json.loads(err)
    assert obj["error"] == "ConditionViolatedError" and obj["residual"] > 1e-6


def test_optimize(capsys):
    code, out, _ = run(capsys, "optimize", "--p", "0.3", "--restarts", "4", "--seed", "3")
    obj = json.loads(out)
    assert code == 0 and obj["within_bound"] is True
    assert obj["best_chi_bits"] <= obj["formula_bits"] + 1e-6


def test_seed_env_fallback(monkeypatch, capsys):
    monkeypatch.setenv("DENSECODE_SEED", "3")
    _, env_out, _ = run(capsys, "optimize", "--p", "0.3", "--restarts", "3")
    monkeypatch.delenv("DENSECODE_SEED")
    _, flag_out, _ = run(capsys, "optimize", "--p", "0.3", "--restarts", "3", "--seed", "3")
    _, other_out, _ = run(capsys, "optimize", "--p", "0.3", "--restarts", "3", "--seed", "4")
    assert env_out == flag_out != other_out


def test_bad_seed_env(monkeypatch, capsys):
    monkeypatch.setenv("DENSECODE_SEED", "abc")
    code, _, err = run(capsys, "capacity")
    assert code == 2 and json.loads(err)["error"] == "ConfigError"


def test_deterministic_output_subprocess():
    argv = [sys.executable, "-m", "densecode", "sweep", "--figure", "5", "--points", "9", "--format", "csv"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and a.startswith(b"p,bell_unitary,bell_preprocessed")


def test_verify_command(capsys):
    code, out, _ = run(capsys, "verify", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] == "module,property,status,residual,tol"
    assert len(lines) == 27 and all(",pass," in line for line in lines[1:])


def test_verify_failure_exit_status(monkeypatch, capsys):
    from densecode import verify

    broken = dataclasses.replace(verify.REGISTRY["weyl_group_law"], func=lambda seed=0: (1.0, "forced"))
    monkeypatch.setitem(verify.REGISTRY, "weyl_group_law", broken)
    code, out, err = run(capsys, "verify")
    assert code == 1
    assert json.loads(out)["passed"] is False
    assert json.loads(err)["error"] == "CheckFailed"
