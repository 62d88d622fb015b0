"""Command-line interface: config round-trip, subcommands, reports, exit codes."""

import json
import math

import numpy as np
import pytest

from mcsvortex import read_field
from mcsvortex.cli import main, parse_config, serialize_config

L = 2.0 * np.pi

BASE_CONFIG = f"""
[grid]
n = 64
length = {L!r}

[model]
name = "u1"
s = 1.0

[vortices]
points = [[{L / 2!r}, {L / 2!r}, 1]]

[problem]
lambda = 40.0
eps = 1e-3
delta = {L / 8!r}
eps_schedule = [1e-2, 3e-3, 1e-3]

[probe]
lambdas = [0.5, 5.0, 40.0]
epsilons = [1e-3, 1e-2]

[output]
directory = "out"
"""


@pytest.fixture()
def cfg_file(tmp_path):
    path = tmp_path / "case.cfg"
    path.write_text(BASE_CONFIG)
    return path


def report(outdir):
    with open(outdir / "report.json", "r", encoding="utf-8") as fh:
        return json.load(fh)


def test_config_round_trip():
    cfg = parse_config(BASE_CONFIG)
    assert cfg.n == 64
    assert cfg.lam == 40.0
    assert cfg.points == ((L / 2, L / 2, 1),)
    again = parse_config(serialize_config(cfg))
    assert again == cfg


def test_config_round_trip_with_solver_overrides():
    text = BASE_CONFIG + "\n[solver]\nmax_iters = 777\ngrad_tol = 1e-9\nseed = 3\n"
    cfg = parse_config(text)
    assert cfg.solver.max_iters == 777
    assert cfg.solver.grad_tol == 1e-9
    assert parse_config(serialize_config(cfg)) == cfg


@pytest.mark.parametrize(
    "mangle, msg",
    [
        (lambda t: t.replace("[grid]", "[grud]"), "missing \\[grid\\]"),
        (lambda t: t.replace("n = 64", ""), "missing key 'n'"),
        (lambda t: t.replace('name = "u1"', ""), "missing key 'name'"),
        (lambda t: t.replace("n = 64", 'n = "many"'), "must be int"),
        (lambda t: t + "\n[solver]\nwarp = 9\n", "unknown keys in \\[solver\\]"),
        (lambda t: t.replace(", 1]]", "]]"), "must be \\[x, y, multiplicity\\]"),
    ],
)
def test_config_errors(mangle, msg):
    with pytest.raises(ValueError, match=msg):
        parse_config(mangle(BASE_CONFIG))


def test_config_invalid_toml():
    with pytest.raises(ValueError, match="parse error"):
        parse_config("not [valid toml")


def test_check_model_pass(cfg_file, capsys):
    assert main(["check-model", "--config", str(cfg_file)]) == 0
    out = capsys.readouterr().out
    assert "declared class consistent: pass" in out


def test_check_model_range_violation(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text(BASE_CONFIG.replace('name = "u1"', 'name = "cp1"').replace("s = 1.0", "s = 1.5"))
    assert main(["check-model", "--config", str(bad)]) == 2
    out = capsys.readouterr().out
    assert "(f1) violated" in out


def test_missing_config_path_is_reported(capsys):
    assert main(["sigma", "--config", "/nonexistent/nowhere.cfg"]) == 2
    err = capsys.readouterr().err
    assert "error:" in err


def test_sigma_command(cfg_file, tmp_path, capsys):
    outdir = tmp_path / "sigma_out"
    assert main(["sigma", "--config", str(cfg_file), "--out", str(outdir)]) == 0
    rep = report(outdir)
    assert rep["flags"]["identities_ok"] is True
    assert abs(rep["metrics"]["sigma_integral"]) <= 1e-8
    assert (outdir / "sigma.vfd").exists()
    assert (outdir / "w.vfd").exists()


def test_subsolution_command(cfg_file, tmp_path):
    outdir = tmp_path / "sub_out"
    assert main(["subsolution", "--config", str(cfg_file), "--out", str(outdir)]) == 0
    rep = report(outdir)
    assert rep["flags"]["subsolution_verified"] is True
    assert rep["flags"]["sign_condition"] is True
    assert rep["metrics"]["inner_margin_max"] <= 0.0
    assert (outdir / "u_lower.vfd").exists()


def test_probe_command(cfg_file, tmp_path, capsys):
    outdir = tmp_path / "probe_out"
    assert main(["probe", "--config", str(cfg_file), "--out", str(outdir)]) == 0
    rep = report(outdir)
    assert rep["flags"]["feasible_nonempty"] is True
    assert rep["metrics"]["lambda0"] <= 40.0
    csv_text = (outdir / "feasible.csv").read_text().strip().splitlines()
    assert csv_text[0].startswith("lambda,")
    assert len(csv_text) == 4
    out = capsys.readouterr().out
    assert "lambda0=" in out


def test_solve_and_verify_commands(cfg_file, tmp_path, capsys):
    outdir = tmp_path / "solve_out"
    assert main(["solve", "--config", str(cfg_file), "--out", str(outdir)]) == 0
    rep = report(outdir)
    assert all(rep["flags"].values()), rep["flags"]
    for name in ("u_min.vfd", "u_mp.vfd", "v_min.vfd", "v_mp.vfd", "trace_min.csv", "path_energies.csv"):
        assert (outdir / name).exists(), name
    for key in ("min_energy_total", "mp_energy_total", "min_grad_norm", "solution_distance_inf"):
        assert key in rep["metrics"], key
    assert rep["metrics"]["solution_distance_inf"] >= 1e-3

    u_min = read_field(outdir / "u_min.vfd")
    assert u_min.grid.n == 64

    verify_dir = tmp_path / "verify_out"
    assert (
        main(
            ["verify", "--config", str(cfg_file), "--out", str(verify_dir), str(outdir / "u_min.vfd")]
        )
        == 0
    )
    with open(verify_dir / "verify_report.json", "r", encoding="utf-8") as fh:
        vrep = json.load(fh)
    # recomputed energy and certificates agree with the solve run
    solve_e = rep["metrics"]["min_energy_total"]
    verify_e = vrep["metrics"]["field_energy_total"]
    assert math.isclose(verify_e, solve_e, rel_tol=1e-12)
    assert vrep["metrics"]["field_flux_rel_err"] <= 1e-6


def test_unknown_command_fails():
    with pytest.raises(SystemExit):
        main(["frobnicate", "--config", "x.cfg"])


def test_continuation_command(cfg_file, tmp_path, capsys):
    outdir = tmp_path / "cont_out"
    code = main(["continuation", "--config", str(cfg_file), "--out", str(outdir)])
    rep = report(outdir)
    assert rep["flags"]["all_converged"] is True
    assert rep["flags"]["trend_eps_lap"] is True
    assert rep["flags"]["h2_slope_ok"] is True
    assert (outdir / "continuation.csv").exists()
    out = capsys.readouterr().out
    assert "continuation:" in out
    # exit code reflects every flag, including the strict energy-gap target
    assert code == (0 if all(rep["flags"].values()) else 1)
