"""Simulator determinism, statistical agreement and configuration guards."""

import dataclasses
import math

import numpy as np
import pytest

import pyrewatch as pw
from pyrewatch.detection import step_probabilities
from pyrewatch.dtmc import detection_curve
from pyrewatch.errors import ScenarioError
from pyrewatch.montecarlo import (
    BOUNDARY_MODES,
    MonteCarloCurve,
    TrialConfig,
    run_trials,
    single_step_frequency,
    wilson_halfwidth,
)


@pytest.fixture(scope="module")
def small():
    # compact field so trials stay cheap: 64 km^2, 4 UAVs, 19 steps
    return pw.scenario_from_dict({
        "forest_area_km2": 64.0,
        "num_uavs": 4,
        "sensor_density_per_km2": 200,
        "flag_threshold": 2,
        "critical_time_min": 13.0,
    })


def test_config_validation(small):
    with pytest.raises(ScenarioError):
        TrialConfig(small, trials=0)
    with pytest.raises(ScenarioError):
        TrialConfig(small, trials=10.5)
    with pytest.raises(ScenarioError):
        TrialConfig(small, seed=-1)
    with pytest.raises(ScenarioError):
        TrialConfig(small, boundary_mode="mirror")
    assert BOUNDARY_MODES == ("interior-ignition", "torus")


def test_same_seed_reproduces_bitwise(small, backends):
    cfg = TrialConfig(small, trials=800, seed=11)
    for backend in backends:
        a = run_trials(cfg, backend=backend)
        b = run_trials(cfg, backend=backend)
        assert np.array_equal(a.detect_steps, b.detect_steps)
        assert np.array_equal(a.false_alarm_counts, b.false_alarm_counts)
        assert np.array_equal(a.pi_detected_mc, b.pi_detected_mc)


def test_different_seeds_differ(small):
    a = run_trials(TrialConfig(small, trials=800, seed=1), backend="numpy")
    b = run_trials(TrialConfig(small, trials=800, seed=2), backend="numpy")
    assert not np.array_equal(a.detect_steps, b.detect_steps)


def test_curve_is_cumulative_over_detect_steps(small):
    mc = run_trials(TrialConfig(small, trials=500, seed=4), backend="numpy")
    assert isinstance(mc, MonteCarloCurve)
    assert len(mc) == small.n_steps_critical
    found = mc.detect_steps[mc.detect_steps > 0]
    hits = np.cumsum(np.bincount(found, minlength=len(mc) + 1)[1:])
    np.testing.assert_array_equal(mc.pi_detected_mc, hits / mc.trials)
    assert np.all(np.diff(mc.pi_detected_mc) >= 0.0)
    assert np.all(mc.ci_halfwidth >= 0.0)
    # detections never land beyond the horizon
    assert mc.detect_steps.max() <= len(mc)


def test_empirical_curve_tracks_the_analysis(small, backends):
    an = detection_curve(small)
    for backend in backends:
        mc = run_trials(TrialConfig(small, trials=2000, seed=7), backend=backend)
        gap = float(np.max(np.abs(mc.pi_detected_mc - an.pi_detected)))
        assert gap <= 0.05, f"{backend} gap {gap:.4f}"


def test_single_step_matches_closed_forms(params):
    sp = step_probabilities(params, 10)
    det, fal = single_step_frequency(TrialConfig(params, trials=20_000, seed=3), k=10)
    assert det == pytest.approx(sp.p_detect, abs=0.01)
    assert fal == pytest.approx(sp.p_false_alarm, abs=0.01)
    with pytest.raises(ScenarioError):
        single_step_frequency(TrialConfig(params, trials=100, seed=3), k=0)


def test_single_step_deterministic(small):
    cfg = TrialConfig(small, trials=2000, seed=9)
    assert single_step_frequency(cfg, k=5) == single_step_frequency(cfg, k=5)


def test_zero_uavs_never_detect(small):
    silent = dataclasses.replace(small, num_uavs=0)
    mc = run_trials(TrialConfig(silent, trials=200, seed=1), backend="numpy")
    assert float(mc.pi_detected_mc.max()) == 0.0
    assert int(mc.false_alarm_counts.max()) == 0


def test_interior_margin_must_fit_the_forest(params):
    # 2 km side cannot hold a ~1.1 km ignition margin on both sides
    cramped = dataclasses.replace(params, forest_area_km2=4.0)
    with pytest.raises(ScenarioError, match="margin"):
        run_trials(TrialConfig(cramped, trials=10))
    # the torus wraps instead and runs fine
    mc = run_trials(
        TrialConfig(cramped, trials=50, seed=2, boundary_mode="torus"), backend="numpy"
    )
    assert np.all((0.0 <= mc.pi_detected_mc) & (mc.pi_detected_mc <= 1.0))


def test_torus_mode_changes_the_answer(small):
    a = run_trials(TrialConfig(small, trials=600, seed=5), backend="numpy")
    b = run_trials(
        TrialConfig(small, trials=600, seed=5, boundary_mode="torus"), backend="numpy"
    )
    assert not np.array_equal(a.detect_steps, b.detect_steps)


def test_outcomes_mapping(small):
    mc = run_trials(TrialConfig(small, trials=300, seed=8), backend="numpy")
    outs = mc.outcomes()
    assert len(outs) == 300
    for o, ds, fc in zip(outs, mc.detect_steps, mc.false_alarm_counts):
        assert o.detected == (ds > 0)
        assert o.detect_step == (int(ds) if ds > 0 else None)
        assert o.false_alarm_count == int(fc)
    det_rate = sum(o.detected for o in outs) / len(outs)
    assert det_rate == pytest.approx(float(mc.pi_detected_mc[-1]), abs=1e-12)


def test_horizon_override_and_validation(small):
    mc = run_trials(TrialConfig(small, trials=100, seed=6), n_steps=5, backend="numpy")
    assert len(mc) == 5
    with pytest.raises(ScenarioError):
        run_trials(TrialConfig(small, trials=100), n_steps=0)


def test_wilson_halfwidth_values_and_properties():
    # frozen against the closed form at z = 1.96 (95%)
    z = 1.959963984540054
    for s, n in ((50, 100), (0, 100), (100, 100), (3, 17)):
        p = s / n
        expect = (
            z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / (1 + z * z / n)
        )
        assert wilson_halfwidth(s, n) == pytest.approx(expect, rel=1e-12)
    # never zero even at the boundary, and symmetric in successes/failures
    assert wilson_halfwidth(0, 50) > 0.0
    np.testing.assert_allclose(
        wilson_halfwidth(np.array([10, 40]), 50)[0],
        wilson_halfwidth(np.array([10, 40]), 50)[1],
        rtol=1e-12,
    )
    # the array form broadcasts
    hw = wilson_halfwidth(np.arange(0, 101), 100)
    assert hw.shape == (101,)
    assert hw.argmax() == 50
