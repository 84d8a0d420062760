import csv

import pytest
import yaml
from click.testing import CliRunner

from aoi_lab.cli import main
from aoi_lab.experiments import MODES


@pytest.fixture
def runner():
    return CliRunner()


def write_cfg(tmp_path, payload, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(payload))
    return str(path)


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


BASE_PARAMS = {"n_ues": 3, "gen_rate": 0.002, "bits": 100.0,
               "coding_rate": 0.85, "snr": 3.0, "overhead": 10.0}


def test_modes_registered(runner):
    result = runner.invoke(main, ["--help"])
    assert result.exit_code == 0
    for mode in MODES + ("serve",):
        assert mode in result.output


def test_analytic_mode_writes_csv(runner, tmp_path):
    cfg = write_cfg(tmp_path, {
        "params": dict(BASE_PARAMS, strategies=["DNP", "BRPS"]),
        "sweep": {"gen_rate": [0.001, 0.002]}})
    out = tmp_path / "out.csv"
    result = runner.invoke(main, ["analytic", "--config", cfg, "--out", str(out)])
    assert result.exit_code == 0, result.output
    rows = read_csv(out)
    assert len(rows) == 4
    assert {"gen_rate", "strategy", "mean_aoi", "divergent",
            "short_blocklength"} <= set(rows[0])
    assert all(float(r["mean_aoi"]) > 0 for r in rows)


def test_analytic_mode_echoes_without_out(runner, tmp_path):
    cfg = write_cfg(tmp_path, {"params": dict(BASE_PARAMS, strategies="DNP")})
    result = runner.invoke(main, ["analytic", "--config", cfg])
    assert result.exit_code == 0, result.output
    assert "mean_aoi=" in result.output


def test_simulate_mode_with_overrides(runner, tmp_path):
    cfg = write_cfg(tmp_path, {
        "params": dict(BASE_PARAMS, gen_rate=0.005, strategies="DNP")})
    out = tmp_path / "sim.csv"
    result = runner.invoke(main, [
        "simulate", "--config", cfg, "--out", str(out),
        "--seed", "7", "--replications", "3", "--horizon", "5e4"])
    assert result.exit_code == 0, result.output
    (row,) = read_csv(out)
    assert int(row["replications"]) == 3
    assert float(row["sim_mean"]) > 0
    assert float(row["ci_half_width"]) >= 0


def test_compare_mode_mismatch_exit_code(runner, tmp_path):
    # over a too-short horizon the sampled age cannot reach the enormous
    # analytic mean of a lossy preemptive broadcast, forcing a mismatch
    cfg = write_cfg(tmp_path, {
        "params": {"n_ues": 1, "gen_rate": 0.01, "bits": 850.0,
                   "coding_rate": 0.85, "snr": 3.0, "strategies": "BRPS"}})
    out = tmp_path / "cmp.csv"
    result = runner.invoke(main, [
        "compare", "--config", cfg, "--out", str(out),
        "--replications", "3", "--horizon", "2e4"])
    assert result.exit_code == 1, result.output
    (row,) = read_csv(out)
    assert row["contained"] == "False"


def test_compare_mode_contained(runner, tmp_path):
    cfg = write_cfg(tmp_path, {
        "params": dict(BASE_PARAMS, gen_rate=0.005, strategies="DNP")})
    result = runner.invoke(main, [
        "compare", "--config", cfg, "--replications", "6",
        "--horizon", "2e5", "--seed", "3"])
    assert result.exit_code == 0, result.output


def test_alpha_threshold_mode(runner, tmp_path):
    cfg = write_cfg(tmp_path, {
        "params": {"gen_rate": 1e3, "cycle": 1.0, "tx_ratio": 1.0},
        "sweep": {"n_ues": [1, 3, 10]}})
    out = tmp_path / "alpha.csv"
    result = runner.invoke(main, ["alpha-threshold", "--config", cfg,
                                  "--out", str(out)])
    assert result.exit_code == 0, result.output
    rows = read_csv(out)
    assert len(rows) == 3
    vals = [float(r["alpha_threshold"]) for r in rows]
    assert vals == sorted(vals, reverse=True)


def test_beta_threshold_mode(runner, tmp_path):
    cfg = write_cfg(tmp_path, {
        "params": {"outer_radius": 20.0, "pathloss_exp": 2.2, "edge_snr": 10.0,
                   "mean_ue_count": 5.0, "overhead": 10.0,
                   "common_bits": 1000.0, "individual_bits": 100.0}})
    out = tmp_path / "beta.csv"
    result = runner.invoke(main, ["beta-threshold", "--config", cfg,
                                  "--out", str(out)])
    assert result.exit_code == 0, result.output
    (row,) = read_csv(out)
    assert float(row["beta_threshold"]) > 0


def test_dynamic_mode(runner, tmp_path):
    cfg = write_cfg(tmp_path, {
        "params": {"outer_radius": 20.0, "pathloss_exp": 2.2, "edge_snr": 10.0,
                   "mean_ue_count": 5.0, "overhead": 10.0,
                   "common_bits": 1000.0, "individual_bits": 100.0,
                   "scheme": "broadcast", "realizations": 500}})
    out = tmp_path / "dyn.csv"
    result = runner.invoke(main, ["dynamic", "--config", cfg, "--out", str(out)])
    assert result.exit_code == 0, result.output
    (row,) = read_csv(out)
    assert float(row["mc_mean"]) > 0
    assert float(row["closed_form"]) > 0


def test_invalid_config_exits_2(runner, tmp_path):
    cfg = write_cfg(tmp_path, {"params": {"n_ues": 3}})
    result = runner.invoke(main, ["analytic", "--config", cfg])
    assert result.exit_code == 2
    assert "missing required parameter" in result.output


def test_invalid_strategy_exits_2(runner, tmp_path):
    cfg = write_cfg(tmp_path, {
        "params": dict(BASE_PARAMS, strategies="DNPZ")})
    result = runner.invoke(main, ["simulate", "--config", cfg,
                                  "--replications", "2", "--horizon", "5e4"])
    assert result.exit_code == 2
    assert "not simulatable" in result.output


def test_missing_config_file(runner):
    result = runner.invoke(main, ["analytic", "--config", "/no/such.yaml"])
    assert result.exit_code == 2


def test_non_mapping_config(runner, tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("- just\n- a\n- list\n")
    result = runner.invoke(main, ["analytic", "--config", str(path)])
    assert result.exit_code != 0
    assert "mapping" in result.output
