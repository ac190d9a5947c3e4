"""CLI: config layering, CSV/JSON artifacts, determinism, exit codes."""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from spprecoil import weak_bias_force
from spprecoil.cli import main

W_SPP = np.sqrt(0.5)


@pytest.fixture()
def runner():
    return CliRunner()


def _rows(csv_text):
    lines = [ln for ln in csv_text.splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:]]


def _header_meta(csv_text):
    meta = {}
    for ln in csv_text.splitlines():
        if ln.startswith("# config: "):
            meta["config"] = json.loads(ln[len("# config: "):])
        elif ln.startswith("# derived: "):
            meta["derived"] = json.loads(ln[len("# derived: "):])
    return meta


def test_angle_sweep_band_edges(runner):
    result = runner.invoke(main, [
        "angle", "--omega-c", "0.4", "--steps", "9"])
    assert result.exit_code == 0
    header, rows = _rows(result.output)
    assert header == ["omega0", "theta0_deg", "ok", "error"]
    angles = [float(r[1]) for r in rows]
    assert angles[0] == pytest.approx(180.0, abs=1e-3)
    assert angles[-1] == pytest.approx(0.0, abs=1e-3)
    assert all(a >= b - 1e-9 for a, b in zip(angles, angles[1:]))


def test_weak_bias_sweep_matches_library(runner):
    result = runner.invoke(main, [
        "sweep-frequency", "--path", "weak-bias", "--omega-c", "0.01",
        "--start", "0.705", "--stop", "0.709", "--steps", "3"])
    assert result.exit_code == 0
    _, rows = _rows(result.output)
    for row in rows:
        w0 = float(row[0])
        assert float(row[1]) == pytest.approx(
            weak_bias_force(w0, 0.01), rel=1e-10)
        assert row[4] == "1"


def test_partial_failure_exit_code_and_no_nan(runner):
    result = runner.invoke(main, [
        "sweep-frequency", "--path", "weak-bias", "--omega-c", "0.01",
        "--start", "0.69", "--stop", "0.72", "--steps", "7"])
    assert result.exit_code == 4
    _, rows = _rows(result.output)
    assert any(r[4] == "0" for r in rows)
    assert any(r[4] == "1" for r in rows)
    assert "nan" not in result.output.lower().replace("# config", "")
    for row in rows:
        if row[4] == "0":
            assert row[1] == ""  # failed points carry no numbers


def test_all_points_failing_exits_3(runner):
    result = runner.invoke(main, [
        "sweep-frequency", "--path", "weak-bias", "--omega-c", "0",
        "--start", "0.2", "--stop", "0.3", "--steps", "3"])
    assert result.exit_code == 3


def test_config_file_layering(runner, tmp_path):
    cfg = tmp_path / "run.yaml"
    cfg.write_text(
        "material: {omega_c: 0.1, gamma_damp: 0.02}\n"
        "emitter: {dipole: x, omega0: 0.75}\n"
        "run: {path: quasistatic-integral}\n"
    )
    result = runner.invoke(main, [
        "force-point", "--config", str(cfg), "--omega-c", "0.3"])
    assert result.exit_code == 0
    meta = _header_meta(result.output)
    # flag overrides file; file overrides default
    assert meta["config"]["material"]["omega_c"] == 0.3
    assert meta["config"]["material"]["gamma_damp"] == 0.02
    assert meta["config"]["emitter"]["dipole"] == "1,0,0"
    assert meta["config"]["run"]["path"] == "quasistatic-integral"
    assert meta["derived"]["omega_spp"] == pytest.approx(W_SPP, rel=1e-9)


def test_json_config_accepted(runner, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({
        "material": {"omega_c": 0.2},
        "emitter": {"omega0": 0.72},
        "run": {"path": "quasistatic-integral"},
        "output": {"format": "json"},
    }))
    result = runner.invoke(main, ["force-point", "--config", str(cfg)])
    assert result.exit_code == 0
    doc = json.loads(result.output)
    assert doc["config"]["material"]["omega_c"] == 0.2
    assert doc["columns"][0] == "omega0"
    assert len(doc["rows"]) == 1
    assert doc["rows"][0][doc["columns"].index("ok")] == 1


def test_byte_determinism(runner):
    args = ["sweep-bias", "--omega0", "0.75", "--start", "0.1", "--stop",
            "0.6", "--steps", "4", "--path", "quasistatic-integral"]
    first = runner.invoke(main, args)
    second = runner.invoke(main, args)
    assert first.exit_code == 0
    assert first.output == second.output


def test_worker_env_preserves_output(runner):
    args = ["sweep-bias", "--omega0", "0.75", "--start", "0.1", "--stop",
            "0.6", "--steps", "4", "--path", "quasistatic-integral"]
    serial = runner.invoke(main, args)
    threaded = runner.invoke(main, args, env={"SPPRECOIL_WORKERS": "3"})
    assert serial.output == threaded.output


def test_map_even_in_bias_magnitude(runner):
    args = ["map", "--path", "quasistatic-integral", "--start", "0.6",
            "--stop", "0.8", "--steps", "3", "--bias-steps", "1"]
    plus = runner.invoke(main, args + ["--bias-start", "0.3",
                                       "--bias-stop", "0.3"])
    minus = runner.invoke(main, args + ["--bias-start", "-0.3",
                                        "--bias-stop", "-0.3"])
    assert plus.exit_code == 0 and minus.exit_code == 0
    _, rows_p = _rows(plus.output)
    _, rows_m = _rows(minus.output)
    for rp, rm in zip(rows_p, rows_m):
        assert float(rp[2]) == pytest.approx(float(rm[2]), rel=1e-9)


def test_efc_topology_column(runner):
    result = runner.invoke(main, [
        "efc", "--omega", "0.7", "--omega-c", "0.8", "--theta-steps", "31"])
    assert result.exit_code == 0
    header, rows = _rows(result.output)
    assert header[5] == "topology"
    assert rows and all(r[5] == "open-hyperbolic" for r in rows)
    for row in rows:
        vg = np.hypot(float(row[3]), float(row[4]))
        assert vg == pytest.approx(1.0, abs=1e-6)


def test_pump_command_population_column(runner):
    result = runner.invoke(main, [
        "pump", "--omega0", "0.75", "--omega-tilde", "0.5", "--t-stop", "8",
        "--t-steps", "5", "--path", "quasistatic-integral"])
    assert result.exit_code == 0
    _, rows = _rows(result.output)
    assert float(rows[0][1]) == pytest.approx(1.0, abs=1e-12)
    static = float(rows[0][2])
    for row in rows:
        assert float(row[2]) == pytest.approx(static * float(row[1]),
                                              rel=1e-9, abs=1e-15)


def test_force_point_cross_check_column(runner):
    result = runner.invoke(main, [
        "force-point", "--omega0", "0.72", "--omega-c", "0.4", "--path",
        "quasistatic-residue", "--gamma-debye", "7900", "--d-nm", "100"])
    assert result.exit_code == 0
    header, rows = _rows(result.output)
    row = dict(zip(header, rows[0]))
    assert float(row["F0_pN"]) == pytest.approx(0.047, rel=0.02)
    assert float(row["delta_vs_quasistatic"]) < 0.25
    assert row["ok"] == "1"


def test_config_errors_exit_2(runner, tmp_path):
    bad_block = tmp_path / "bad.yaml"
    bad_block.write_text("materials: {omega_c: 0.1}\n")
    for args in (
        ["sweep-bias", "--omega0", "0.7", "--steps", "0"],
        ["force-point", "--dipole", "1,2"],
        ["force-point", "--config", str(bad_block)],
        ["force-point", "--config", str(tmp_path / "missing.yaml")],
        ["force-point", "--path", "nonsense"],
    ):
        result = runner.invoke(main, args)
        assert result.exit_code == 2, args
