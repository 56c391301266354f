"""Smoke tests for the Python surface: anchors, the solver, and one day."""

import math

import pytest

import helios


def test_light_response_anchor():
    assert abs(helios.etr(200.0) - 51.4678) < 1e-3
    assert helios.etr(0.0) == 0.0
    assert abs(helios.ppfd_for_etr(helios.etr(137.5)) - 137.5) < 1e-9


def test_ppfd_for_etr_rejects_asymptote():
    with pytest.raises(Exception):
        helios.ppfd_for_etr(121.0)


def test_cost_conversion_factor():
    assert helios.cost_conversion_factor() == 0.25 / 2800.0
    assert abs(10.0 * 200.0 * helios.cost_conversion_factor() - 0.1786) < 1e-4


def test_watts_to_ppfd():
    assert abs(helios.watts_to_ppfd(100.0) - 202.0) < 1e-12


def test_led_ppfd_matches_curve_inverse():
    assert abs(helios.led_ppfd(helios.etr(150.0)) - 150.0) < 1e-9
    # Saturation: the same increment takes more lamp output on top of sun.
    assert helios.led_ppfd(10.0, 400.0) > helios.led_ppfd(10.0, 0.0)


def test_solve_horizon_meets_budget():
    out = helios.solve_horizon([10.0, 20.0], [0.0, 0.0], 75.0)
    assert out["feasible"]
    assert sum(out["led_etr"]) == pytest.approx(75.0, abs=1e-6)
    assert out["budget_residual"] >= -1e-6
    # The cheaper step carries at least as much of the load.
    assert out["led_etr"][0] >= out["led_etr"][1]
    assert out["cost"] > 0.0
    assert len(out["led_ppfd"]) == 2


def test_solve_horizon_reports_infeasible():
    out = helios.solve_horizon([10.0], [0.0], 1000.0)
    assert not out["feasible"]


def test_score_hand_example():
    s = helios.score([0.0, 10.0, 20.0], [0.0, 10.0, 26.0])
    assert abs(s["rmse_abs"] - math.sqrt(12.0)) < 1e-12
    assert abs(s["r_squared"] - 0.82) < 1e-12


def test_score_zero_variance_has_no_r_squared():
    s = helios.score([5.0, 5.0], [5.0, 5.0])
    assert s["r_squared"] is None
    assert s["rmse_abs"] == 0.0


def test_simulate_baseline_winter_day():
    day = helios.simulate_synthetic_day("baseline", month=12, day=15)
    assert day["strategy"] == "baseline"
    assert day["feasible"]
    assert day["dpi_met"]
    assert day["realized_dpi"] >= 3.0 * (1.0 - 1e-6)
    assert len(day["led_ppfd"]) == 64
    assert day["total_cost"] > 0.0


def test_simulate_markov_day_meets_target():
    day = helios.simulate_synthetic_day("markov", month=12, day=15)
    assert day["dpi_met"]
    assert day["realized_dpi"] >= 3.0 * (1.0 - 1e-6)


def test_simulate_is_deterministic():
    a = helios.simulate_synthetic_day("baseline", month=3, day=10, seed=4)
    b = helios.simulate_synthetic_day("baseline", month=3, day=10, seed=4)
    assert a["led_ppfd"] == b["led_ppfd"]
    assert a["total_cost"] == b["total_cost"]


def test_simulate_bnn_needs_saved_model():
    with pytest.raises(ValueError):
        helios.simulate_synthetic_day("bnn")
