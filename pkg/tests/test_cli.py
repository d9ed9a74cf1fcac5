"""Command-line surface: exit codes, formats, config precedence, values."""

import csv
import io
import json
import math
import shutil
import subprocess

import pytest

from lhdeform.cli import main
from lhdeform.coeffexpr import as_function
from lhdeform.sl2systems import (CoefficientSet, assemble_system,
                                 build_realization, mp_coefficients,
                                 pdm_profile)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def rows_of(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], [[float(cell) for cell in row] for row in rows[1:]]


def fmt12(v):
    return float(f"{v:.12g}")


# ------------------------------------------------------------------ simulate

SIM_OSC = ("family=mp", "z=0", "c=0", "omega_sq=1", "state=0,1")


def test_simulate_oscillator_is_a_sinusoid(capsys):
    code, out, err = run(capsys, "simulate", *SIM_OSC,
                         "t_span=0,6.283185307179586", "samples=5")
    assert code == 0 and err == ""
    header, rows = rows_of(out)
    assert header == ["t", "x", "y", "h_z", "F_z"]
    assert len(rows) == 5
    for t, x, y, h, f2 in rows:
        assert x == pytest.approx(math.sin(t), abs=1e-8)
        assert y == pytest.approx(math.cos(t), abs=1e-8)
        assert h == pytest.approx(0.5, abs=1e-8)
        assert f2 == pytest.approx(0.0, abs=1e-12)


def test_simulate_csv_reparses_to_in_process_values(capsys):
    code, out, _ = run(capsys, "simulate", "family=mp", "z=0.3", "c=4",
                       "omega_sq=1 + 0.2 * cos(t)", "state=1,0",
                       "t_span=0,5", "samples=11")
    assert code == 0
    _, rows = rows_of(out)
    r = build_realization("mp", 0.3, 4.0)
    system = assemble_system(r, mp_coefficients(
        as_function("1 + 0.2 * cos(t)")))
    for t, x, y, h, f2 in rows:
        # x and y lost digits past the 12th in the file; h inherits that
        assert h == pytest.approx(system.hamiltonian(t, x, y), rel=1e-10)
        assert f2 == fmt12(1.0)  # deformed Casimir sits at c/4


def test_simulate_first_row_is_the_initial_state(capsys):
    code, out, _ = run(capsys, "simulate", "family=cr", "z=0.2", "b1=1",
                       "b2=cos(t)", "b3=0.5", "state=1.2,0.8",
                       "t_span=0,0.5", "samples=3")
    assert code == 0
    _, rows = rows_of(out)
    t, x, y, h, _ = rows[0]
    assert (t, x, y) == (0.0, 1.2, 0.8)
    coeffs = CoefficientSet(as_function("1"), as_function("cos(t)"),
                            as_function("0.5"))
    system = assemble_system(build_realization("cr", 0.2), coeffs)
    assert h == fmt12(system.hamiltonian(0.0, 1.2, 0.8))


def test_simulate_json_format(capsys):
    code, out, _ = run(capsys, "simulate", *SIM_OSC, "t_span=0,1",
                       "samples=3", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["schema_version"] == 1
    assert payload["columns"] == ["t", "x", "y", "h_z", "F_z"]
    assert len(payload["rows"]) == 3


def test_simulate_emits_partial_output_when_the_run_dies(capsys):
    # the b3 field drags the cr chart toward its v = 0 edge
    code, out, err = run(capsys, "simulate", "family=cr", "z=0.1", "b3=1",
                         "state=1,1", "t_span=0,20", "samples=81")
    assert code == 1
    assert "partial output" in err
    _, rows = rows_of(out)
    assert rows and rows[-1][0] < 20.0


# ------------------------------------------------------------------ drift

DRIFT_ARGS = ("family=mp", "z=0.3", "c=4", "omega_sq=1 + 0.2 * cos(t)",
              "state1=1,0", "state2=2,1", "t_span=0,10")


def test_drift_series_on_stdout_summary_on_stderr(capsys):
    code, out, err = run(capsys, "drift", *DRIFT_ARGS)
    assert code == 0
    header, rows = rows_of(out)
    assert header == ["t", "F2"]
    assert len(rows) == 201
    summary = json.loads(err)
    assert summary["invariant"] == "F2"
    assert summary["termination"] == "completed"
    assert summary["initial_value"] == pytest.approx(25.045202645344155,
                                                     rel=1e-12)
    assert summary["rel_drift"] < 1e-6
    assert summary["family"] == "mp" and summary["z"] == 0.3


def test_drift_summary_moves_to_stdout_when_series_has_a_file(capsys,
                                                              tmp_path):
    series = tmp_path / "series.csv"
    code, out, err = run(capsys, "drift", *DRIFT_ARGS, "--out", str(series))
    assert code == 0 and err == ""
    summary = json.loads(out)
    assert summary["rel_drift"] < 1e-6
    header, rows = rows_of(series.read_text())
    assert header == ["t", "F2"] and len(rows) == 201


def test_drift_grows_when_tolerances_loosen(capsys):
    _, _, tight = run(capsys, "drift", *DRIFT_ARGS, "rtol=1e-10")
    _, _, loose = run(capsys, "drift", *DRIFT_ARGS, "rtol=1e-8")
    tight_drift = json.loads(tight)["rel_drift"]
    loose_drift = json.loads(loose)["rel_drift"]
    assert 0.0 < tight_drift < loose_drift < 1e-6


# ------------------------------------------------------------------ verify

def test_verify_report_passes_and_records_the_seed(capsys):
    code, out, _ = run(capsys, "verify", "families=mp", "mp_couplings=0.5",
                       "z_grid=0,0.1")
    assert code == 0
    report = json.loads(out)
    assert report["passed"] and report["n_failed"] == 0
    assert report["seed"] == 2026
    assert report["n_checks"] == len(report["suites"]) == 33


def test_verify_output_is_deterministic(capsys):
    args = ("verify", "families=cr", "z_grid=0,0.2")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second


def test_verify_seed_flag_beats_config_key(capsys):
    _, out, _ = run(capsys, "verify", "families=cr", "z_grid=0",
                    "seed=5", "--seed", "9")
    assert json.loads(out)["seed"] == 9
    _, out, _ = run(capsys, "verify", "families=cr", "z_grid=0", "seed=5")
    assert json.loads(out)["seed"] == 5


def test_verify_csv_has_one_line_per_check(capsys):
    code, out, _ = run(capsys, "verify", "families=2r", "z_grid=0,0.1",
                       "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == ("suite,identity,family,z,c,samples,"
                        "max_residual,tolerance,passed")
    assert len(lines) == 1 + 33


def test_verify_surfaces_overflow_as_a_runtime_error(capsys):
    # 2 z x^2 tops the sh guard at this z, well inside the sample box
    code, out, err = run(capsys, "verify", "families=mp", "mp_couplings=0.5",
                         "z_grid=300")
    assert code == 1 and out == ""
    assert err.startswith("error:") and "overflow" in err


def test_verify_rejects_unknown_family(capsys):
    code, _, err = run(capsys, "verify", "families=mp,sl2")
    assert code == 2
    assert "unknown family 'sl2'" in err


# ------------------------------------------------------------------ map

def test_map_cr_hand_value_with_diagnostics(capsys):
    code, out, _ = run(capsys, "map", "map=cr", "point=1.5,0.7",
                       "--format", "json")
    assert code == 0
    result = json.loads(out)
    assert result["map"] == "mp->cr/plus"
    assert result["output"][0] == pytest.approx(-7.0 / 15.0, rel=1e-14)
    assert result["output"][1] == pytest.approx(-8.0 / 9.0, rel=1e-14)
    # det J equals the square of the image v-coordinate
    assert result["jacobian_det"] == pytest.approx((8.0 / 9.0) ** 2, rel=1e-12)
    assert result["roundtrip_error"] < 1e-14


@pytest.mark.parametrize("branch, expected", [
    ("plus", (1.5, 0.7)),
    ("minus", (-1.5, -0.7)),
])
def test_map_inverse_direction_follows_the_branch(capsys, branch, expected):
    code, out, _ = run(capsys, "map", "map=cr", "direction=inverse",
                       f"branch={branch}",
                       "point=-0.4666666666666666,-0.8888888888888888",
                       "--format", "json")
    assert code == 0
    result = json.loads(out)
    assert result["output"][0] == pytest.approx(expected[0], rel=1e-12)
    assert result["output"][1] == pytest.approx(expected[1], rel=1e-12)
    assert result["roundtrip_error"] < 1e-13


def test_map_csv_row(capsys):
    code, out, _ = run(capsys, "map", "map=i7", "point=2,3")
    assert code == 0
    header, rows = rows_of(out)
    assert header == ["x_in", "y_in", "x_out", "y_out"]
    assert rows == [[2.0, 3.0, 1.5, 0.5]]


def test_map_off_chart_point_is_a_runtime_error(capsys):
    code, _, err = run(capsys, "map", "map=cr", "point=0,1")
    assert code == 1
    assert err.startswith("error:") and "chart" in err


# ------------------------------------------------------------------ pdm

def test_pdm_matches_the_profile_rows(capsys):
    code, out, _ = run(capsys, "pdm", "zs=0,0.5", "x_min=0", "x_max=1",
                       "x_points=3")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "x,z,m_z,U_osc,U_rw"
    expected = [row for z in (0.0, 0.5)
                for row in pdm_profile(z).rows([0.0, 0.5, 1.0])]
    parsed = [[float(cell) for cell in line.split(",")] for line in lines[1:]]
    assert len(parsed) == len(expected) == 6
    for got, want in zip(parsed, expected):
        for g, w in zip(got, want):
            assert g == fmt12(w) or (math.isinf(g) and math.isinf(w))


def test_pdm_classical_rows_and_the_origin(capsys):
    _, out, _ = run(capsys, "pdm", "zs=0", "x_min=0", "x_max=1", "x_points=3")
    _, rows = rows_of(out)
    x0, _, m0, u0, w0 = rows[0]
    assert (x0, m0, u0) == (0.0, 1.0, 0.0) and math.isinf(w0)
    for x, _, m, u_osc, u_rw in rows[1:]:
        assert m == 1.0
        assert u_osc == pytest.approx(x * x, rel=1e-12)
        assert u_rw == pytest.approx(1.0 / (x * x), rel=1e-12)


def test_pdm_json_turns_the_pole_into_null(capsys):
    _, out, _ = run(capsys, "pdm", "zs=0", "x_min=0", "x_max=1",
                    "x_points=2", "--format", "json")
    payload = json.loads(out)
    assert payload["rows"][0][4] is None
    assert payload["rows"][1][4] == 1.0


def test_pdm_rejects_a_backwards_grid(capsys):
    code, _, err = run(capsys, "pdm", "x_min=2", "x_max=-2")
    assert code == 2
    assert "x_max must exceed x_min" in err


# ------------------------------------------------------------------ appendix

def test_appendix_report_passes(capsys):
    code, out, _ = run(capsys, "appendix")
    assert code == 0
    report = json.loads(out)
    assert report["passed"]
    assert all(c["passed"] for c in report["checks"].values())
    assert report["fit"]["max_deviation"] < 1e-6
    assert report["gl2"]["max_residual"] < 1e-10


# ------------------------------------------------------------------ config

def test_config_file_with_flag_and_override_precedence(capsys, tmp_path):
    ignored = tmp_path / "ignored.json"
    target = tmp_path / "target.json"
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# oscillator run\n"
        "family = mp\n"
        "z = 0\n"
        "c = 0\n"
        'omega_sq = "1"\n'
        "state = 0,1\n"
        "t_span = 0,1\n"
        "samples = 3\n"
        "format = json\n"
        f"out = {ignored}\n")
    code, out, err = run(capsys, "simulate", "--config", str(cfg),
                         "samples=5", "--out", str(target))
    assert code == 0 and out == "" and err == ""
    assert target.exists() and not ignored.exists()
    payload = json.loads(target.read_text())
    assert len(payload["rows"]) == 5  # override beat the file's samples = 3


def test_format_flag_beats_config_format(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("format = json\n")
    _, out, _ = run(capsys, "simulate", "--config", str(cfg), *SIM_OSC,
                    "t_span=0,1", "samples=3", "--format", "csv")
    assert out.splitlines()[0] == "t,x,y,h_z,F_z"


def test_malformed_config_lines_are_reported_with_location(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("family = mp\njust some text\n")
    code, _, err = run(capsys, "simulate", "--config", str(cfg))
    assert code == 2
    assert f"{cfg}:2" in err and "expected key = value" in err


def test_unreadable_config_file(capsys, tmp_path):
    code, _, err = run(capsys, "simulate", "--config",
                       str(tmp_path / "absent.cfg"))
    assert code == 2
    assert "cannot read config file" in err


def test_unknown_key_lists_the_allowed_ones(capsys):
    code, _, err = run(capsys, "simulate", *SIM_OSC, "t_span=0,1", "t0=0")
    assert code == 2
    assert "unknown key 't0'" in err
    assert "t_span" in err and "omega_sq" in err


def test_all_config_errors_come_out_together(capsys):
    code, _, err = run(capsys, "simulate", "family=mp", "c=1", "z=abc",
                       "state=1", "t_span=5,1", "samples=1", "omega_sq=1")
    assert code == 2
    lines = err.splitlines()
    assert all(line.startswith("config error:") for line in lines)
    assert any("z: expected a number" in line for line in lines)
    assert any("state: expected two numbers" in line for line in lines)
    assert any("t_span: expected t0,t1 with t1 > t0" in line
               for line in lines)
    assert any("samples: must be >= 2" in line for line in lines)


def test_missing_required_keys_are_named(capsys):
    code, _, err = run(capsys, "simulate", "family=mp", "c=1", "omega_sq=1")
    assert code == 2
    assert "missing required key 'state'" in err
    assert "missing required key 't_span'" in err


def test_mp_family_requires_a_coupling(capsys):
    code, _, err = run(capsys, "simulate", "family=mp", "omega_sq=1",
                       "state=0,1", "t_span=0,1")
    assert code == 2
    assert "c: required for the mp family" in err


def test_omega_sq_conflicts_with_explicit_coefficients(capsys):
    code, _, err = run(capsys, "simulate", *SIM_OSC, "t_span=0,1", "b2=0.5")
    assert code == 2
    assert "give either omega_sq or b1/b2/b3" in err


def test_omega_sq_is_mp_only(capsys):
    code, _, err = run(capsys, "simulate", "family=cr", "omega_sq=1",
                       "state=1,1", "t_span=0,1")
    assert code == 2
    assert "only meaningful for the mp family" in err


def test_coefficient_parse_errors_carry_the_key(capsys):
    code, _, err = run(capsys, "simulate", "family=mp", "c=1",
                       "omega_sq=1 +", "state=0,1", "t_span=0,1")
    assert code == 2
    assert "omega_sq:" in err


def test_bare_override_without_equals(capsys):
    code, _, err = run(capsys, "simulate", "family")
    assert code == 2
    assert "not of the form key=value" in err


# ------------------------------------------------------------------ script

def test_console_script_runs():
    exe = shutil.which("lhdeform")
    if exe is None:
        pytest.skip("console script not on PATH")
    proc = subprocess.run([exe, "pdm", "zs=0", "x_min=1", "x_max=2",
                           "x_points=2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "x,z,m_z,U_osc,U_rw"
