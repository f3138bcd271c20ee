"""End-to-end tests for the command-line front end.

Each test drives main() with argv lists and asserts on exit codes,
stdout/stderr text, and written files. Exit codes: 0 success, 1 runtime
infeasibility, 2 usage or configuration error.
"""

import math

import pytest

from ris_isac import bench, scenario
from ris_isac.cli import main

MICRO = ["--set", "m_antennas=3", "--set", "n_elements=4",
         "--set", "k_users=2", "--set", "l_slots=1"]


# ---------------------------------------------------------------------------
# validate and configuration plumbing
# ---------------------------------------------------------------------------


def test_validate_reports_ok(capsys):
    assert main(["validate"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("config ok:")
    assert "M=6" in out and "N=32" in out


def test_validate_quiet_prints_nothing(capsys):
    assert main(["validate", "--quiet"]) == 0
    assert capsys.readouterr().out == ""


def test_set_overrides_take_precedence_over_config_file(tmp_path, capsys):
    path = tmp_path / "base.cfg"
    path.write_text("m_antennas = 4\nn_elements = 16\n", encoding="utf-8")
    assert main(["validate", "--config", str(path),
                 "--set", "n_elements=0"]) == 0
    out = capsys.readouterr().out
    assert "M=4" in out and "N=0" in out


def test_seed_flag_wins_over_set(capsys):
    assert main(["validate", "--set", "seed=3", "--seed", "9"]) == 0
    assert "seed=9" in capsys.readouterr().out


def test_unknown_config_key_exits_2(capsys):
    assert main(["validate", "--set", "bandwidth=1"]) == 2
    assert capsys.readouterr().err.startswith("config error:")


def test_malformed_set_exits_2(capsys):
    assert main(["validate", "--set", "m_antennas"]) == 2
    assert "--set expects KEY=VALUE" in capsys.readouterr().err


def test_unparseable_value_exits_2(capsys):
    assert main(["validate", "--set", "m_antennas=six"]) == 2
    assert capsys.readouterr().err.startswith("config error:")


def test_missing_config_file_exits_2(tmp_path, capsys):
    missing = tmp_path / "nope.cfg"
    assert main(["validate", "--config", str(missing)]) == 2
    assert "cannot read config" in capsys.readouterr().err


def test_unknown_flag_raises_usage_error():
    with pytest.raises(SystemExit) as err:
        main(["solve", "--bogus"])
    assert err.value.code == 2


def test_missing_subcommand_raises_usage_error():
    with pytest.raises(SystemExit) as err:
        main([])
    assert err.value.code == 2


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------


def test_solve_writes_byte_identical_csv_on_reruns(tmp_path):
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    for path in (first, second):
        assert main(["solve", *MICRO, "--quiet", "--out", str(path)]) == 0
    a = first.read_text(encoding="utf-8")
    assert a == second.read_text(encoding="utf-8")
    lines = a.splitlines()
    assert lines[0] == ("slot,sum_rate_bps_hz,radar_snr_db,power_w,"
                        "iterations,converged")
    assert len(lines) == 2
    assert lines[1].startswith("0,")
    assert lines[1].endswith(",1")


def test_solve_trace_rows_start_at_iteration_zero(tmp_path):
    path = tmp_path / "trace.csv"
    assert main(["solve", *MICRO, "--trace", "--quiet",
                 "--out", str(path)]) == 0
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "slot,iteration,sum_rate_bps_hz,radar_snr_db,power_w"
    assert len(lines) >= 3
    assert lines[1].startswith("0,0,")
    assert lines[2].startswith("0,1,")


def test_solve_prints_summary_report(capsys):
    assert main(["solve", *MICRO]) == 0
    out = capsys.readouterr().out
    assert "slots 1" in out
    assert "sum_rate_bps_hz " in out
    assert "converged 1/1" in out


def test_solve_infeasible_floor_exits_1(capsys):
    assert main(["solve", *MICRO, "--set", "gamma_db=60", "--quiet"]) == 1
    err = capsys.readouterr().err
    assert err.startswith("infeasible:")
    assert "sensing floor" in err


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

SWEEP_ARGS = ["sweep", *MICRO, "--set", "sweep_param=p_max_dbm",
              "--set", "sweep_grid=30", "--set", "sweep_seeds=0,1",
              "--set", "sweep_schemes=no-ris", "--quiet"]


def test_sweep_writes_expected_rows(tmp_path):
    path = tmp_path / "sweep.csv"
    assert main([*SWEEP_ARGS, "--jobs", "1", "--out", str(path)]) == 0
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(bench.CSV_COLUMNS)
    assert len(lines) == 3
    assert lines[1].startswith("no-ris,p_max_dbm,30,0,")
    assert lines[2].startswith("no-ris,p_max_dbm,30,1,")
    assert all(line.endswith(",ok") for line in lines[1:])


def test_sweep_summary_goes_to_stdout(capsys):
    assert main([col for col in SWEEP_ARGS if col != "--quiet"]
                + ["--jobs", "1"]) == 0
    captured = capsys.readouterr()
    assert "no-ris p_max_dbm=30 mean " in captured.out
    assert "ok 2 infeasible 0" in captured.out
    # row CSV goes to stdout when --out is omitted
    assert captured.out.startswith(",".join(bench.CSV_COLUMNS))


def test_sweep_reads_jobs_from_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("RIS_ISAC_JOBS", "1")
    path = tmp_path / "sweep.csv"
    assert main([*SWEEP_ARGS, "--out", str(path)]) == 0
    assert path.exists()
    monkeypatch.setenv("RIS_ISAC_JOBS", "abc")
    assert main([*SWEEP_ARGS, "--out", str(path)]) == 2
    assert "RIS_ISAC_JOBS" in capsys.readouterr().err


def test_sweep_requires_parameter(capsys):
    assert main(["sweep", *MICRO, "--set", "sweep_grid=30", "--quiet"]) == 2
    assert "sweep_param" in capsys.readouterr().err


def test_sweep_rejects_unknown_scheme(capsys):
    assert main(["sweep", *MICRO, "--set", "sweep_param=p_max_dbm",
                 "--set", "sweep_grid=30", "--set", "sweep_schemes=mrt",
                 "--quiet"]) == 2
    assert "unknown scheme" in capsys.readouterr().err


def test_sweep_rejects_nonpositive_jobs(capsys):
    assert main([*SWEEP_ARGS, "--jobs", "0"]) == 2
    assert "--jobs" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# dump-channels
# ---------------------------------------------------------------------------


def test_dump_channels_is_deterministic(tmp_path):
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    for path in (first, second):
        assert main(["dump-channels", *MICRO, "--out", str(path)]) == 0
    a = first.read_text(encoding="utf-8")
    assert a == second.read_text(encoding="utf-8")
    lines = a.splitlines()
    assert lines[0] == "slot,name,row,col,re,im"
    m, n, k = 3, 4, 2
    assert len(lines) == 1 + (n * m + k * m + k * n + m + n)
    for line in lines[1:]:
        slot, name, row, col, re, im = line.split(",")
        assert slot == "0" and name in {"G", "h_d", "h_r", "g_dt", "g_rt"}
        int(row), int(col)
        assert math.isfinite(float(re)) and math.isfinite(float(im))
