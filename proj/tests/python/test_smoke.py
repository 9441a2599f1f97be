"""End-to-end smoke tests for the compiled module and the CLI binary.

The CMake test target puts the built extension directory on PYTHONPATH and
exports the CLI path as PROXMO_CLI.
"""

import math
import os
import subprocess

import numpy as np
import pytest

import _proxmo as px


def _cli():
    path = os.environ.get("PROXMO_CLI")
    if not path or not os.path.exists(path):
        pytest.skip("PROXMO_CLI not set")
    return path


def test_generate_solve_certify_round_trip():
    instance, x0 = px.generate_instance(seed=3, run_index=0, n=4, m=2, delta=0.05)
    assert instance.n == 4
    assert instance.m == 2
    assert len(x0) == 4

    result = px.solve(instance, x0, method="bfgs")
    assert result["status"] == "stationary"
    assert result["iterations"] >= 1
    assert result["final_dnorm"] < 1e-6

    F_start = instance.F(np.asarray(x0))
    assert all(result["F"][i] < F_start[i] for i in range(2))

    trace = result["trace"]
    assert len(trace["dnorm"]) == result["iterations"]
    assert all(b <= 1e-10 for b in trace["beta"])

    cert = px.certify(instance, result["x"], omega=5.0, tol=5e-10)
    assert cert["stationary"]
    assert cert["beta_est"] <= 1e-12
    assert cert["beta_est"] == min(cert["beta_solver"], cert["beta_oracle"])


def test_direction_matches_solve_termination():
    instance, x0 = px.generate_instance(seed=5, run_index=1, n=3, m=2, delta=0.0)
    result = px.solve(instance, x0, method="pgm")
    sub = px.direction(instance, result["x"], omega=5.0, pgm=True)
    assert np.linalg.norm(sub["d"]) < 1e-6
    assert sub["gap"] <= 1e-12
    assert math.isclose(sum(sub["weights"]), 1.0, abs_tol=1e-9)


def test_json_round_trip():
    instance, _ = px.generate_instance(seed=9, run_index=2, n=3, m=2, delta=0.1)
    text = instance.to_json()
    clone = px.instance_from_json(text)
    x = np.array([0.3, -0.7, 1.1])
    assert np.array_equal(instance.F(x), clone.F(x))


def test_cli_solve_and_check(tmp_path):
    cli = _cli()
    instance, x0 = px.generate_instance(seed=11, run_index=0, n=3, m=2, delta=0.05)
    instance_file = tmp_path / "instance.json"
    instance_file.write_text(instance.to_json())
    x0_file = tmp_path / "x0.txt"
    x0_file.write_text(" ".join(repr(float(v)) for v in x0))
    trace_file = tmp_path / "trace.csv"

    solve = subprocess.run(
        [cli, "solve", "--instance", str(instance_file), "--x0", str(x0_file),
         "--method", "hbfgs", "--out", str(trace_file)],
        capture_output=True, text=True)
    assert solve.returncode == 0, solve.stderr
    assert "status: stationary" in solve.stdout

    lines = trace_file.read_text().splitlines()
    assert lines[0] == "iteration,dnorm,beta,theta,step,backtracks,gap,sub_iterations,F1,F2"
    assert len(lines) >= 2

    x_final = solve.stdout.split("x_final:")[1].splitlines()[0].split()
    point_file = tmp_path / "point.txt"
    point_file.write_text(" ".join(x_final))
    check = subprocess.run(
        [cli, "check", "--instance", str(instance_file), "--point", str(point_file)],
        capture_output=True, text=True)
    assert check.returncode == 0, check.stdout + check.stderr
    assert check.stdout.startswith("stationary")

    origin_file = tmp_path / "origin.txt"
    origin_file.write_text("10 10 10")
    bad = subprocess.run(
        [cli, "check", "--instance", str(instance_file), "--point", str(origin_file)],
        capture_output=True, text=True)
    assert bad.returncode == 3
    assert bad.stdout.startswith("not stationary")


def test_cli_config_file(tmp_path):
    cli = _cli()
    instance, _ = px.generate_instance(seed=5, run_index=0, n=3, m=2, delta=0.0)
    instance_file = tmp_path / "instance.json"
    instance_file.write_text(instance.to_json())
    trace_file = tmp_path / "trace.csv"
    config_file = tmp_path / "solve.ini"
    config_file.write_text(
        "[solve]\n"
        f'instance = "{instance_file}"\n'
        'method = "bfgs"\n'
        f'out = "{trace_file}"\n')

    from_config = subprocess.run(
        [cli, "solve", "--config", str(config_file)], capture_output=True, text=True)
    assert from_config.returncode == 0, from_config.stderr
    assert "status: stationary" in from_config.stdout
    assert trace_file.exists()

    override_file = tmp_path / "override.csv"
    overridden = subprocess.run(
        [cli, "solve", "--config", str(config_file), "--out", str(override_file)],
        capture_output=True, text=True)
    assert overridden.returncode == 0, overridden.stderr
    assert override_file.exists()


def test_cli_experiment(tmp_path):
    cli = _cli()
    out_dir = tmp_path / "exp"
    proc = subprocess.run(
        [cli, "experiment", "--seed", "2", "--runs", "2", "--n", "3",
         "--deltas", "0,0.05", "--methods", "pgm,bfgs", "--out-dir", str(out_dir)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "8 runs" in proc.stdout

    records = (out_dir / "records.csv").read_text().splitlines()
    assert records[0] == ("run_id,delta,method,line_search,status,iterations,"
                          "wallclock_ms,nondominated,F1,F2,x1,x2,x3")
    assert len(records) == 9
    assert (out_dir / "summary.txt").exists()


def test_invalid_method_rejected():
    instance, x0 = px.generate_instance(seed=1, run_index=0, n=2, m=2, delta=0.0)
    with pytest.raises(Exception):
        px.solve(instance, x0, method="newton")
