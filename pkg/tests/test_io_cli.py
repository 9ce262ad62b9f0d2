import json
import math

import numpy as np
import pytest

from switchfrac.cli import EXIT_ERROR, EXIT_FAIL, EXIT_OK, main
from switchfrac.io import RunConfigError, load_config, read_forcing_csv, write_rows
from switchfrac.sine_basis import GridFunction, write_grid_csv

PROBLEM = {"alpha": 1.25, "beta": 0.5, "a": 0.5, "b": 1.0, "xi": 0.75, "modes": 4}


def write_config(tmp_path, **entries):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({**PROBLEM, "time_nodes": 21, "space_nodes": 11, **entries}))
    return path


def read_csv(path):
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


# {{{ configuration files


def test_config_with_csv_data_and_forcing(tmp_path):
    (tmp_path / "data").mkdir()
    x = np.linspace(0.0, 1.0, 65)
    write_grid_csv(tmp_path / "data" / "phi.csv", GridFunction(np.sin(2 * math.pi * x)))
    t = np.linspace(0.0, 1.0, 11)
    write_rows(tmp_path / "data" / "f.csv", ["t", "f_1", "f_2"], [t, np.zeros_like(t), 1 + t])
    path = write_config(tmp_path, phi={"csv": "data/phi.csv"}, B=[0.5], forcing="data/f.csv")

    run = load_config(path)
    assert run.problem.K == 4
    np.testing.assert_allclose(run.series("phi").coeffs, [0, 1, 0, 0], atol=1e-14)
    np.testing.assert_array_equal(run.series("B").coeffs, [0.5, 0, 0, 0])
    np.testing.assert_array_equal(run.series("jump").coeffs, np.zeros(4))
    assert set(run.forcing.modes) == {2}
    assert run.forcing.value(2, 0.5) == pytest.approx(1.5)


def test_overrides_take_precedence(tmp_path):
    run = load_config(write_config(tmp_path), {"modes": 7, "alpha": None, "tol": 1e-10})
    assert run.problem.K == 7
    assert run.problem.alpha == 1.25
    assert run.ml_tol == 1e-10


def test_config_errors(tmp_path):
    with pytest.raises(RunConfigError, match="not found"):
        load_config(tmp_path / "missing.json")
    with pytest.raises(RunConfigError, match="xi"):
        load_config(None, {k: v for k, v in PROBLEM.items() if k != "xi"})
    with pytest.raises(RunConfigError, match="not found"):
        load_config(write_config(tmp_path, phi="nope.csv"))
    with pytest.raises(RunConfigError, match="coefficients"):
        load_config(write_config(tmp_path, phi={"values": [1]}))


def test_forcing_csv_header_is_checked(tmp_path):
    bad = tmp_path / "f.csv"
    bad.write_text("time,f_1\n0,1\n1,1\n")
    with pytest.raises(RunConfigError):
        read_forcing_csv(bad)
    bad.write_text("t,g\n0,1\n1,1\n")
    with pytest.raises(RunConfigError):
        read_forcing_csv(bad)


# }}}


# {{{ command line


def test_ml_eval(capsys):
    assert main(["ml-eval", "1", "1", "-1"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split()[0] == "value"
    assert float(lines[0].split()[1]) == pytest.approx(math.exp(-1), abs=1e-15)
    assert lines[1].startswith("abs_error_estimate ")
    assert lines[2] == "method series"


def test_ml_eval_domain_error(capsys):
    assert main(["ml-eval", "1", "1", "2"]) == EXIT_ERROR
    assert "error" in capsys.readouterr().err


def test_forward_then_inverse_round_trip(tmp_path):
    cfg = write_config(tmp_path, phi=[1.0, 0.0, 0.2], B=[0.0, -0.5])
    fwd = tmp_path / "fwd"
    assert main(["forward", "--config", str(cfg), "--out", str(fwd)]) == EXIT_OK
    for name in ("u.csv", "u.json", "h.csv", "psi.csv", "report.json"):
        assert (fwd / name).is_file()
    report = json.loads((fwd / "report.json").read_text())
    assert report["residuals"]["continuity_max"] <= 1e-8
    assert report["config"]["modes"] == 4

    u = read_csv(fwd / "u.csv")
    assert u.shape[1] == 3
    assert len(np.unique(u[:, 0])) >= 21 and len(np.unique(u[:, 1])) == 11

    inv_cfg = write_config(tmp_path, phi=[1.0, 0.0, 0.2], psi=report["psi"])
    inv = tmp_path / "inv"
    assert main(["inverse1", "--config", str(inv_cfg), "--out", str(inv)]) == EXIT_OK
    back = json.loads((inv / "report.json").read_text())
    np.testing.assert_allclose(back["interface"], report["induced_h"], atol=1e-9)
    np.testing.assert_allclose(back["B"], [0.0, -0.5, 0.0, 0.0], atol=1e-9)
    np.testing.assert_allclose(read_csv(inv / "h.csv"), read_csv(fwd / "h.csv"), atol=1e-8)


def test_inverse2_writes_hbar(tmp_path):
    cfg = write_config(tmp_path, psi=[0.1, 0.02])
    assert main(["inverse2", "--config", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_OK
    assert (tmp_path / "o" / "hbar.csv").is_file()
    assert json.loads((tmp_path / "o" / "report.json").read_text())["problem"] == 2


def test_flags_alone_define_a_run(tmp_path):
    argv = ["forward", "--alpha", "1.5", "--beta", "0.4", "--a", "0.3", "--b", "1", "--xi", "0.6"]
    argv += ["--modes", "2", "--out", str(tmp_path)]
    assert main(argv) == EXIT_OK
    assert json.loads((tmp_path / "report.json").read_text())["config"]["alpha"] == 1.5


def test_outputs_are_deterministic(tmp_path):
    cfg = write_config(tmp_path, phi=[1.0, 0.5], B=[0.3])
    for out in ("r1", "r2"):
        assert main(["forward", "--config", str(cfg), "--out", str(tmp_path / out)]) == EXIT_OK
    for name in ("u.csv", "h.csv", "psi.csv", "u.json"):
        assert (tmp_path / "r1" / name).read_bytes() == (tmp_path / "r2" / name).read_bytes()


def test_inverse_needs_snapshot_data(tmp_path, capsys):
    cfg = write_config(tmp_path)
    assert main(["inverse1", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_ERROR
    assert "psi" in capsys.readouterr().err


def test_invalid_problem_exits_with_error(tmp_path):
    cfg = write_config(tmp_path, xi=0.2)
    assert main(["forward", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_ERROR


def test_guard_failure_and_skip_flag(tmp_path):
    # switch time at the first zero of E_{1.8,1}(-pi^2 a^1.8)
    cfg = write_config(
        tmp_path, alpha=1.8, a=0.437141720062931, b=1.0, xi=0.75, modes=2, psi=[0.1, 0.1]
    )
    out = str(tmp_path / "o")
    assert main(["inverse2", "--config", str(cfg), "--out", out]) == EXIT_ERROR
    assert main(["inverse2", "--config", str(cfg), "--skip-bad-modes", "--out", out]) == EXIT_OK
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    assert report["excluded_modes"] == [1]
    assert report["interface"][0] == 0.0


def test_table1_command(tmp_path, capsys):
    assert main(["table1", "--out", str(tmp_path)]) == EXIT_OK
    assert "1.8" in capsys.readouterr().out
    assert json.loads((tmp_path / "report.json").read_text())["passed"] is True
    assert main(["table1", "--ml-perturbation", "0.01"]) == EXIT_FAIL


def test_accept_single_suite(tmp_path, capsys):
    assert main(["accept", "--suite", "p2", "--out", str(tmp_path)]) == EXIT_OK
    assert "p2: PASS" in capsys.readouterr().out
    verdict = json.loads((tmp_path / "report.json").read_text())
    assert verdict["passed"] is True and set(verdict["suites"]) == {"p2"}


# }}}
