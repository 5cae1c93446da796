"""
Tests for src/sensitivity.py and run_sensitivity_analysis.py.
"""

import json

import pandas as pd
import pytest

from run_sensitivity_analysis import format_sensitivity_summary, run_sensitivity, save_results
from src.sensitivity import (
    format_coupling_table,
    format_passes_table,
    run_coupling_sweep,
    run_passes_sweep,
)
from src.scenario import load_preset, scenario_from_dict


@pytest.fixture
def lab_scenario():
    return scenario_from_dict(load_preset("lab_cavity"), passes=60)


# ---------------------------------------------------------------------------
# Coupling sweep
# ---------------------------------------------------------------------------


class TestCouplingSweep:
    def test_splitting_scales_with_coupling(self, lab_scenario):
        rows = run_coupling_sweep(lab_scenario, couplings=[1e-10, 1e-12])
        assert all(r["feasible"] for r in rows)
        assert rows[0]["delta_theta_rad"] == pytest.approx(100.0 * rows[1]["delta_theta_rad"], rel=1e-9)
        assert rows[0]["std_y_m"] == pytest.approx(100.0 * rows[1]["std_y_m"], rel=1e-9)
        assert rows[0]["theta_mode_rad"] == pytest.approx(0.5 * rows[0]["delta_theta_rad"])

    def test_deficit_scales_with_coupling_squared(self, lab_scenario):
        rows = run_coupling_sweep(lab_scenario, couplings=[1e-10, 1e-11])
        assert rows[0]["central_deficit"] == pytest.approx(100.0 * rows[1]["central_deficit"], rel=1e-6)

    def test_mixing_loss_follows_coupling(self, lab_scenario):
        rows = run_coupling_sweep(lab_scenario, couplings=[1e-10, 1e-11])
        assert rows[0]["axion_loss"] == pytest.approx(lab_scenario.cavity.axion_loss, rel=1e-12)
        assert rows[0]["axion_loss"] == pytest.approx(100.0 * rows[1]["axion_loss"], rel=1e-6)

    def test_explicit_loss_is_held(self):
        raw = load_preset("lab_cavity")
        raw["name"] = "custom"
        raw["cavity"]["axion_loss"] = 0.01
        rows = run_coupling_sweep(scenario_from_dict(raw, passes=20), couplings=[1e-10, 1e-12])
        assert [r["axion_loss"] for r in rows] == [0.01, 0.01]

    def test_unphysical_coupling_is_reported(self, lab_scenario):
        rows = run_coupling_sweep(lab_scenario, couplings=[1e10])
        assert rows[0]["feasible"] is False
        assert "beta must be in [0, 1)" in rows[0]["error"]

    def test_default_grid(self, lab_scenario):
        rows = run_coupling_sweep(lab_scenario, passes=10)
        assert [r["g_a_gev_inv"] for r in rows] == [1e-10, 1e-11, 1e-12, 1e-13, 1e-14]

    def test_table(self, lab_scenario):
        rows = run_coupling_sweep(lab_scenario, couplings=[1e-10, 1e10], passes=10)
        table = format_coupling_table(rows)
        assert isinstance(table, pd.DataFrame)
        assert table["Feasible"].tolist() == ["Yes", "DOMAIN ERROR"]


# ---------------------------------------------------------------------------
# Passes sweep
# ---------------------------------------------------------------------------


class TestPassesSweep:
    def test_rows_match_formula(self, lab_scenario):
        rows = run_passes_sweep(lab_scenario, [10, 100])
        assert [r["passes"] for r in rows] == [10, 100]
        for r in rows:
            assert r["std_y_m"] == pytest.approx(r["analytic_std_m"], rel=1e-9)
            assert r["linear_control_m"] == pytest.approx(lab_scenario.cavity.theta_mode * r["z_total_m"])
            assert r["deficit_small_shift"] == pytest.approx(0.5 * r["std_y_m"] ** 2 / 1e-6)

    def test_bifurcation_outgrows_control(self, lab_scenario):
        rows = run_passes_sweep(lab_scenario, [1000])
        assert rows[0]["std_y_m"] > rows[0]["linear_control_m"]

    def test_needs_cavity(self):
        scenario = scenario_from_dict(load_preset("magnetar"))
        with pytest.raises(ValueError, match="cavity"):
            run_passes_sweep(scenario)

    def test_table_columns(self, lab_scenario):
        table = format_passes_table(run_passes_sweep(lab_scenario, [10, 100]))
        assert table.columns[0] == "Passes"
        assert len(table) == 2


# ---------------------------------------------------------------------------
# Runner
# ---------------------------------------------------------------------------


def test_runner_writes_outputs(tmp_path):
    sweep = {"couplings_gev_inv": [1e-10, 1e-11], "pass_counts": [10, 100]}
    results = run_sensitivity(load_preset("lab_cavity"), sweep, passes=20)
    summary = format_sensitivity_summary(results)
    assert "COUPLING SENSITIVITY" in summary
    assert "PASS COUNT SENSITIVITY" in summary

    save_results(results, tmp_path)
    for name in ("coupling_sweep.csv", "passes_sweep.csv", "sensitivity_results.json", "sensitivity_summary.txt"):
        assert (tmp_path / name).exists()
    data = json.loads((tmp_path / "sensitivity_results.json").read_text())
    assert data["scenario"] == "lab_cavity"
    assert len(data["coupling_sensitivity"]) == 2
