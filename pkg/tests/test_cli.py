"""Config parsing, command dispatch, artifact emission, and exit codes."""

import filecmp
import os

import numpy as np
import pytest

from nehari import ConfigInvalid, ConfigNotFound, load_config, main

T1_CONFIG = """\
# constant-weight preset on the unit interval
[mesh]
dimension = 1
extents = 0,1
nodes = 201

[params]
p = 2.0
q = 1.5
r = 3.0
s = 3.0
lambda = 0.1
mu = 0.1
f = constant:1
g = constant:1
h = constant:1

[solver]
seed_strategy = hat

[output]
directory = out
"""


def _write_config(tmp_path, text=T1_CONFIG, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_load_config_resolves_values(tmp_path):
    config = load_config(_write_config(tmp_path))
    assert config.mesh.nodes_per_axis == (201,)
    assert config.params.p == 2.0 and config.params.q == 1.5
    assert config.params.lam == 0.1 and config.params.mu == 0.1
    assert np.all(config.params.f.values == 1.0)
    # omitted solver keys take their defaults
    assert config.options.max_iterations == 5000
    assert config.options.tol_residual == 1e-8
    assert config.options.seed_strategy == "hat"
    assert config.output_directory == "out"
    assert config.emit_fields
    # the echo reproduces every resolved setting
    echo = "\n".join(config.echo)
    assert "params.q = 1.5" in echo
    assert "solver.tol_residual = 1e-08" in echo
    assert "mesh.nodes = 201" in echo


def test_load_config_missing_file():
    with pytest.raises(ConfigNotFound):
        load_config("/nonexistent/run.cfg")


def test_load_config_rejects_exponent_order(tmp_path):
    bad = T1_CONFIG.replace("q = 1.5", "q = 2.5")
    with pytest.raises(ConfigInvalid) as excinfo:
        load_config(_write_config(tmp_path, bad))
    message = str(excinfo.value)
    assert "q" in message and "line 9" in message


def test_load_config_rejects_unknown_key(tmp_path):
    bad = T1_CONFIG.replace("nodes = 201", "nodes = 201\nshape = fancy")
    with pytest.raises(ConfigInvalid) as excinfo:
        load_config(_write_config(tmp_path, bad))
    assert "shape" in str(excinfo.value)
    assert "line 6" in str(excinfo.value)


def test_load_config_rejects_bad_values(tmp_path):
    for breakage, needle in (
        (("p = 2.0", "p = two"), "not a number"),
        (("f = constant:1", "f = gaussian:1"), "unknown weight"),
        (("dimension = 1", "dimension = 3"), "must be 1 or 2"),
        (("mu = 0.1", "mu = 0.1\nmu = 0.2"), "duplicate"),
    ):
        bad = T1_CONFIG.replace(*breakage)
        with pytest.raises(ConfigInvalid) as excinfo:
            load_config(_write_config(tmp_path, bad))
        assert needle in str(excinfo.value)


def test_load_config_rejects_missing_section(tmp_path):
    bad = T1_CONFIG.split("[params]")[0]
    with pytest.raises(ConfigInvalid) as excinfo:
        load_config(_write_config(tmp_path, bad))
    assert "params" in str(excinfo.value)


def test_load_config_rejects_entry_outside_section(tmp_path):
    with pytest.raises(ConfigInvalid):
        load_config(_write_config(tmp_path, "stray = 1\n" + T1_CONFIG))


def test_main_solve_writes_artifacts(tmp_path, capsys):
    config = _write_config(tmp_path)
    out = str(tmp_path / "run1")
    assert main(["solve", "--config", config, "--out", out]) == 0
    expected = [
        "summary.txt",
        "u_plus.csv",
        "v_plus.csv",
        "u_minus.csv",
        "v_minus.csv",
        "energy_history_plus.csv",
        "energy_history_minus.csv",
    ]
    for name in expected:
        assert os.path.isfile(os.path.join(out, name)), name
    summary = open(os.path.join(out, "summary.txt")).read()
    assert "exit_status = 0" in summary
    assert "plus.converged = true" in summary
    assert "minus.converged = true" in summary
    assert "coupling_coefficients = 0.5,0.5" in summary
    assert "distinctness" in summary
    # wall time goes to stdout only, never into files
    captured = capsys.readouterr()
    assert "wall_time_seconds" in captured.out
    assert "wall_time" not in summary
    history = open(os.path.join(out, "energy_history_plus.csv")).read().splitlines()
    assert history[0] == "iteration,energy"
    energies = [float(row.split(",")[1]) for row in history[1:]]
    assert all(b <= a for a, b in zip(energies, energies[1:]))


def test_main_solve_deterministic(tmp_path):
    config = _write_config(tmp_path)
    out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
    assert main(["solve", "--config", config, "--out", out1]) == 0
    assert main(["solve", "--config", config, "--out", out2]) == 0
    for name in os.listdir(out1):
        assert filecmp.cmp(
            os.path.join(out1, name), os.path.join(out2, name), shallow=False
        ), name


def test_main_verify_round_trip(tmp_path, capsys):
    config = _write_config(tmp_path)
    out = str(tmp_path / "run")
    assert main(["solve", "--config", config, "--out", out]) == 0
    solve_out = capsys.readouterr().out
    assert main(["verify", "--config", config, "--out", out]) == 0
    verify_out = capsys.readouterr().out
    assert "plus.verified = true" in verify_out
    assert "minus.verified = true" in verify_out
    # the re-read fields reproduce the in-memory residual to 1e-12
    def grab(text, key):
        for line in text.splitlines():
            if line.startswith(key):
                return float(line.split("=")[1])
        raise AssertionError(key)

    for label in ("plus", "minus"):
        solved = grab(solve_out, f"{label}.residual_max")
        verified = grab(verify_out, f"{label}.residual_max")
        assert abs(solved - verified) <= 1e-12 * max(abs(solved), 1e-30)


def test_main_verify_detects_corruption(tmp_path):
    config = _write_config(tmp_path)
    out = str(tmp_path / "run")
    assert main(["solve", "--config", config, "--out", out]) == 0
    path = os.path.join(out, "u_minus.csv")
    rows = open(path).read().splitlines()
    x, _ = rows[100].split(",")
    rows[100] = f"{x},1.5"
    open(path, "w").write("\n".join(rows) + "\n")
    assert main(["verify", "--config", config, "--out", out]) == 1


def test_main_missing_config_exits_2(capsys):
    assert main(["solve", "--config", "/nonexistent/run.cfg"]) == 2
    assert "error" in capsys.readouterr().err


def test_main_invalid_config_exits_2(tmp_path, capsys):
    bad = T1_CONFIG.replace("q = 1.5", "q = 2.5")
    assert main(["solve", "--config", _write_config(tmp_path, bad)]) == 2
    err = capsys.readouterr().err
    assert "q" in err and "line" in err


def test_main_output_collision_exits_2(tmp_path, capsys):
    config = _write_config(tmp_path)
    blocker = tmp_path / "blocked"
    blocker.write_text("file, not a directory")
    assert main(["thresholds", "--config", config, "--out", str(blocker)]) == 2
    assert "error" in capsys.readouterr().err


def test_main_fibering_artifacts(tmp_path, capsys):
    config = _write_config(tmp_path)
    out = str(tmp_path / "fib")
    assert main(["fibering", "--config", config, "--out", out]) == 0
    stdout = capsys.readouterr().out
    assert "root_count = 2" in stdout
    assert "root_0.branch = Plus" in stdout
    assert "root_1.branch = Minus" in stdout
    rows = open(os.path.join(out, "fibering.csv")).read().splitlines()
    assert rows[0] == "t,phi,dphi"
    assert len(rows) == 513


def test_main_thresholds_certifies_preset(tmp_path, capsys):
    config = _write_config(tmp_path)
    out = str(tmp_path / "thr")
    assert main(["thresholds", "--config", config, "--out", out]) == 0
    stdout = capsys.readouterr().out
    assert "certified = true" in stdout
    assert "lambda0" in stdout
    summary = open(os.path.join(out, "summary.txt")).read()
    assert "lower_bound" in summary and "upper_value" in summary


def test_main_sobolev_table(tmp_path, capsys):
    config = _write_config(tmp_path)
    out = str(tmp_path / "sob")
    assert main(["sobolev", "--config", config, "--out", out]) == 0
    stdout = capsys.readouterr().out
    for key in ("S_q.value", "S_rs.value", "S_p.value"):
        assert key in stdout


def test_main_summary_written_on_numerical_failure(tmp_path):
    # an iteration budget of 1 cannot converge: exit 1, summary still emitted
    starved = T1_CONFIG.replace(
        "seed_strategy = hat", "seed_strategy = hat\nmax_iterations = 1\ntol_residual = 1e-14"
    )
    config = _write_config(tmp_path, starved)
    out = str(tmp_path / "failed")
    assert main(["solve", "--config", config, "--out", out]) == 1
    summary = open(os.path.join(out, "summary.txt")).read()
    assert "exit_status = 1" in summary
    assert "error" in summary
