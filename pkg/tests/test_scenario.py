"""Scenario parameter derivation and validation."""

import dataclasses
import json
from fractions import Fraction

import pytest

import pyrewatch as pw
from pyrewatch.errors import ScenarioError
from pyrewatch.scenario import ChannelParams, derived_step_count


def test_default_derived_quantities_are_exact(params):
    assert params.n_sensors == 72_000
    assert params.n_collect == 90
    assert params.t_step_min == 0.65
    assert params.t_step_exact == Fraction(13, 20)
    assert params.n_steps_critical == 46
    assert params.n_steps_fallback == 46


def test_step_time_is_exact_rational_not_float_sum():
    # 90 * 0.1 / 60 + 0.5 accumulates float error when done naively
    p = pw.scenario_from_dict({})
    assert p.t_step_exact == Fraction(9, 60) + Fraction(1, 2)
    assert float(p.t_step_exact) == p.t_step_min


def test_collected_count_floors():
    p = pw.scenario_from_dict({"sensor_density_per_km2": 10})
    # 10 * pi * 0.4^2 = 5.026...
    assert p.n_collect == 5
    p = pw.scenario_from_dict({"sensor_density_per_km2": 10, "collection_ratio": 0.5})
    assert p.n_collect == 2


def test_replace_recomputes_derived_fields(params):
    p = dataclasses.replace(params, sensor_density_per_km2=360.0)
    assert p.n_collect == 180
    assert p.n_sensors == 144_000
    assert p.t_step_exact == Fraction(180, 600) + Fraction(1, 2)
    assert p.n_steps_critical == 37


def test_unknown_keys_rejected():
    with pytest.raises(ScenarioError, match="unknown scenario keys"):
        pw.scenario_from_dict({"sensor_densty_per_km2": 100})
    with pytest.raises(ScenarioError, match="unknown channel keys"):
        pw.scenario_from_dict({"channel": {"tx_power": 1}})


def test_validation_errors():
    with pytest.raises(ScenarioError):
        pw.scenario_from_dict({"sensor_density_per_km2": -1})
    with pytest.raises(ScenarioError):
        pw.scenario_from_dict({"combined_error": 0.51})
    with pytest.raises(ScenarioError):
        pw.scenario_from_dict({"combined_error": -0.01})
    with pytest.raises(ScenarioError):
        pw.scenario_from_dict({"collection_ratio": 0.0})
    with pytest.raises(ScenarioError):
        pw.scenario_from_dict({"collection_ratio": 1.2})
    with pytest.raises(ScenarioError, match="flag_threshold"):
        pw.scenario_from_dict({"flag_threshold": 0})
    # more flags required than observations collectable per stop
    with pytest.raises(ScenarioError, match="flag_threshold"):
        pw.scenario_from_dict({"sensor_density_per_km2": 10, "flag_threshold": 8})
    with pytest.raises(ScenarioError, match="verify_time_min"):
        pw.scenario_from_dict({"verify_time_min": 0.1})
    with pytest.raises(ScenarioError, match="critical_time"):
        pw.scenario_from_dict({"critical_time_min": 0.2})


def test_booleans_rejected_as_numbers():
    with pytest.raises(ScenarioError):
        pw.scenario_from_dict({"num_uavs": True})
    with pytest.raises(ScenarioError):
        pw.scenario_from_dict({"budget": True})


def test_integral_floats_accepted_for_counts():
    p = pw.scenario_from_dict({"num_uavs": 12.0})
    assert p.num_uavs == 12
    with pytest.raises(ScenarioError):
        pw.scenario_from_dict({"num_uavs": 12.5})


def test_json_round_trip(tmp_path, params):
    cfg = {"sensor_density_per_km2": 90, "flag_threshold": 3}
    text = json.dumps(cfg)
    p = pw.scenario_from_json(text)
    assert p.sensor_density_per_km2 == 90
    assert p.flag_threshold == 3
    path = tmp_path / "scenario.json"
    path.write_text(text)
    assert pw.load_scenario(path) == p
    with pytest.raises(ScenarioError, match="invalid JSON"):
        pw.scenario_from_json("{nope")
    with pytest.raises(ScenarioError, match="JSON object"):
        pw.scenario_from_json("[1, 2]")


def test_channel_derived_error_used_when_not_given():
    from pyrewatch.link_budget import (
        bpsk_ber,
        combined_error,
        db_to_linear,
        repetition_error,
    )

    chan = ChannelParams()
    p = pw.scenario_from_dict({"channel": dataclasses.asdict(chan)})
    # repetition-coded BER at the target SNR folded into the sensing error
    ber = bpsk_ber(db_to_linear(chan.target_snr_db))
    eps_t = repetition_error(ber, chan.repetitions)
    expect = combined_error(chan.sensing_error, eps_t)
    assert p.combined_error == pytest.approx(expect, rel=1e-12)


def test_explicit_error_wins_over_channel():
    chan = dataclasses.asdict(ChannelParams())
    p = pw.scenario_from_dict({"combined_error": 0.2, "channel": chan})
    assert p.combined_error == 0.2


def test_channel_validation():
    with pytest.raises(ScenarioError, match="repetitions"):
        pw.scenario_from_dict({"channel": {"repetitions": 2}})
    with pytest.raises(ScenarioError, match="sensing_error"):
        pw.scenario_from_dict({"channel": {"sensing_error": 0.6}})
    with pytest.raises(ScenarioError, match="eta_nlos_db"):
        pw.scenario_from_dict({"channel": {"eta_los_db": 5.0, "eta_nlos_db": 1.0}})


def test_derived_step_count_matches_floor(params):
    assert derived_step_count(params, 30.0) == 46
    assert derived_step_count(params, 0.65) == 1
    with pytest.raises(ScenarioError):
        derived_step_count(params, 0.0)
    with pytest.raises(ScenarioError):
        derived_step_count(params, 0.3)
