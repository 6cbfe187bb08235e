"""Tests for the CLI interface"""
import csv
import json

import pytest

from app.cli import cli
from app.schemas.experiment import FINITE_K_COLUMNS, RESULT_COLUMNS

TINY_SCHEDULE = {"t0": 0.05, "c_sa": 2.0, "temp_steps": 2, "configs_per_temp": 6}
BASIC_QOS = {"buffer": 0, "ccon": 1, "theta_tar": 0.3, "nu_d": 0.02}


@pytest.fixture
def write_config(tmp_path):
    def write(**overrides):
        data = {"qos": BASIC_QOS, "schedule": TINY_SCHEDULE, "output_dir": str(tmp_path / "out")}
        data.update(overrides)
        path = tmp_path / "config.json"
        path.write_text(json.dumps(data))
        return str(path)
    return write


def read_table(path):
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))


def without_timing(rows):
    return [{k: v for k, v in row.items() if k != "wall_ms"} for row in rows]


def invoke(runner, *args):
    return runner.invoke(cli, ["--log-level", "WARNING", *args])


def test_optimize_writes_result_files(runner, write_config, tmp_path):
    result = invoke(runner, "optimize", "--config", write_config())
    assert result.exit_code == 0, result.output
    assert "optimize: 1 rows" in result.output

    out = tmp_path / "out"
    with open(out / "results.csv") as handle:
        assert handle.readline().strip() == ",".join(RESULT_COLUMNS)
    rows = read_table(out / "results.csv")
    assert len(rows) == 1
    assert rows[0]["command"] == "optimize"
    assert rows[0]["seed"] == "0"
    assert rows[0]["epsilon"] == ""
    assert rows[0]["feasible"] in ("true", "false")
    assert rows[0]["evaluations"] == "12"
    assert (out / "summary.csv").exists()
    assert not (out / "finite_k.csv").exists()
    echo = json.loads((out / "config.echo.json").read_text())
    assert echo["schedule"]["temp_steps"] == 2


def test_out_option_overrides_the_config(runner, write_config, tmp_path):
    target = tmp_path / "elsewhere"
    result = invoke(runner, "optimize", "--config", write_config(), "--out", str(target))
    assert result.exit_code == 0, result.output
    assert (target / "results.csv").exists()


def test_invalid_configs_exit_with_code_two(runner, write_config, tmp_path):
    result = invoke(runner, "optimize", "--config", write_config(qos={"buffer": -1}))
    assert result.exit_code == 2
    assert "invalid configuration" in result.output

    result = invoke(runner, "optimize", "--config", write_config(unknown_key=1))
    assert result.exit_code == 2

    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    result = invoke(runner, "optimize", "--config", str(broken))
    assert result.exit_code == 2
    assert not (tmp_path / "out").exists()


def test_sweep_needs_an_axis(runner, write_config):
    result = invoke(runner, "sweep", "--config", write_config())
    assert result.exit_code == 2
    assert "sweep" in result.output


def test_cso_energy_needs_error_free_transmission(runner, write_config):
    result = invoke(runner, "optimize", "--config", write_config(beta2=0.01))
    assert result.exit_code == 2
    assert "nu_d" in result.output


def test_sweep_rows_are_sorted(runner, write_config, tmp_path):
    result = invoke(
        runner, "sweep", "--config", write_config(), "--axis", "nu_d", "--values", "0.05,0.02", "--seeds", "1,0"
    )
    assert result.exit_code == 0, result.output
    rows = read_table(tmp_path / "out" / "results.csv")
    assert [(r["nu_d"], r["seed"]) for r in rows] == [("0.02", "0"), ("0.02", "1"), ("0.05", "0"), ("0.05", "1")]
    summary = read_table(tmp_path / "out" / "summary.csv")
    assert [(s["axis"], s["value"], s["runs"]) for s in summary] == [("nu_d", "0.02", "2"), ("nu_d", "0.05", "2")]


def test_sweep_rejects_bad_values(runner, write_config):
    result = invoke(runner, "sweep", "--config", write_config(), "--axis", "B", "--values", "1.5")
    assert result.exit_code == 2
    result = invoke(runner, "sweep", "--config", write_config(), "--axis", "nu_d", "--values", "a,b")
    assert result.exit_code == 2


def test_simulate_is_reproducible(runner, write_config, tmp_path):
    config = write_config(policy=[[0.7], [0.9]])
    first = invoke(runner, "simulate", "--config", config, "--slots", "20000", "--out", str(tmp_path / "a"))
    second = invoke(runner, "simulate", "--config", config, "--slots", "20000", "--out", str(tmp_path / "b"))
    assert first.exit_code == 0, first.output
    assert second.exit_code == 0, second.output
    assert "agrees with the chain" in first.output or "disagrees with the chain" in first.output
    rows_a = read_table(tmp_path / "a" / "results.csv")
    rows_b = read_table(tmp_path / "b" / "results.csv")
    assert without_timing(rows_a) == without_timing(rows_b)
    assert rows_a[0]["feasible"] == "true"
    assert float(rows_a[0]["theta_r"]) == pytest.approx(0.2625, abs=0.02)
    assert rows_a[0]["ebn0_db"] != ""


def test_simulate_rejects_a_policy_of_the_wrong_shape(runner, write_config):
    result = invoke(runner, "simulate", "--config", write_config(policy=[[0.7]]), "--slots", "100")
    assert result.exit_code == 2


def test_finite_k_writes_per_user_table(runner, write_config, tmp_path):
    config = write_config(finite_k={"gains": [1.0, 2.0], "beta2": 0.01})
    result = invoke(runner, "finite-k", "--config", config, "--seeds", "3,1")
    assert result.exit_code == 0, result.output
    out = tmp_path / "out"
    with open(out / "finite_k.csv") as handle:
        assert handle.readline().strip() == ",".join(FINITE_K_COLUMNS)
    users = read_table(out / "finite_k.csv")
    assert [u["user"] for u in users] == ["0", "1"]
    assert float(users[0]["energy_exact"]) == pytest.approx(0.18978, abs=1e-5)
    assert float(users[1]["rate"]) == pytest.approx(0.25)
    rows = read_table(out / "results.csv")
    assert len(rows) == 1
    assert rows[0]["seed"] == "1"
    assert rows[0]["beta2"] == "0.01"


def test_finite_k_needs_its_block(runner, write_config):
    result = invoke(runner, "finite-k", "--config", write_config())
    assert result.exit_code == 2


def test_buffer_search_reports_the_smallest_buffer(runner, write_config, tmp_path):
    config = write_config(
        buffer_search={"buffers": [1, 0], "delta_e_db": 0.0},
        schedule={**TINY_SCHEDULE, "configs_per_temp": 20},
    )
    result = invoke(runner, "buffer-search", "--config", config)
    assert result.exit_code == 0, result.output
    assert "B*=0" in result.output
    rows = read_table(tmp_path / "out" / "results.csv")
    assert [r["B"] for r in rows] == ["0", "1"]


def test_gamma_max_ignores_the_configured_bound(runner, write_config, tmp_path):
    qos = {**BASIC_QOS, "ccon": 2, "epsilon": 0.01}
    result = invoke(runner, "gamma-max", "--config", write_config(qos=qos))
    assert result.exit_code == 0, result.output
    rows = read_table(tmp_path / "out" / "results.csv")
    assert rows[0]["epsilon"] == ""
    assert rows[0]["N"] == "2"


def test_parallel_jobs_match_serial_run(runner, write_config, tmp_path):
    config = write_config(sweep={"axis": "N", "values": [1, 2]})
    serial = invoke(runner, "sweep", "--config", config, "--out", str(tmp_path / "serial"))
    parallel = invoke(runner, "sweep", "--config", config, "--out", str(tmp_path / "parallel"), "--jobs", "2")
    assert serial.exit_code == 0, serial.output
    assert parallel.exit_code == 0, parallel.output
    assert without_timing(read_table(tmp_path / "serial" / "results.csv")) == without_timing(
        read_table(tmp_path / "parallel" / "results.csv")
    )
