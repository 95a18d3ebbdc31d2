"""Scenario configuration: deployment parameters and derived per-step quantities.

A scenario bundles everything the analytical chain, the simulator and the
planners need: forest size, sensor density, UAV fleet, fire spread speed,
timing constants and the cost model.  Derived quantities (observations
collected per stop, step duration, step counts for the two horizons) are
computed once at construction.

The step duration T = N*T_obs/60 + T_travel and the step counts K = floor(T_f/T),
Kbar = floor(T_D/T) are derived with exact rational arithmetic so that decimal
inputs produce the exact expected values (e.g. the default scenario gives
T = 13/20 = 0.65 min and K = 46, not a float a few ulp off).
"""

from __future__ import annotations

import dataclasses
import json
import logging
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

from .errors import ScenarioError

__all__ = [
    "ChannelParams",
    "ScenarioParams",
    "scenario_from_dict",
    "scenario_from_json",
    "load_scenario",
    "derived_step_count",
]

logger = logging.getLogger(__name__)


def _require_number(name: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{name} must be a real number, got {value!r}")
    v = float(value)
    if not math.isfinite(v):
        raise ScenarioError(f"{name} must be finite, got {value!r}")
    return v


def _require_int(name: str, value: Any) -> int:
    if isinstance(value, bool):
        raise ScenarioError(f"{name} must be an integer, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    raise ScenarioError(f"{name} must be an integer, got {value!r}")


def _positive(name: str, value: float) -> float:
    if not value > 0.0:
        raise ScenarioError(f"{name} must be positive, got {value}")
    return value


def _exact(value: float) -> Fraction:
    # Fraction(str(x)) keeps decimal inputs exact; repr round-trips floats.
    return Fraction(str(value))


@dataclass(frozen=True)
class ChannelParams:
    """Uplink channel model constants for an urban-ish aerial link.

    Angles are handled in degrees inside the LoS model; power quantities are
    dB/dBm and converted to linear internally.
    """

    tx_power_dbm: float = 10.0
    noise_dbm: float = -90.0
    path_loss_exp: float = 2.0
    eta_los_db: float = 0.1
    eta_nlos_db: float = 21.0
    env_a: float = 4.88
    env_b: float = 0.43
    repetitions: int = 3
    sensing_error: float = 0.1
    target_snr_db: float = 5.0

    def __post_init__(self) -> None:
        _positive("channel.path_loss_exp", _require_number("channel.path_loss_exp", self.path_loss_exp))
        _positive("channel.env_a", _require_number("channel.env_a", self.env_a))
        _positive("channel.env_b", _require_number("channel.env_b", self.env_b))
        reps = _require_int("channel.repetitions", self.repetitions)
        if reps < 1 or reps % 2 == 0:
            raise ScenarioError(f"channel.repetitions must be a positive odd integer, got {reps}")
        object.__setattr__(self, "repetitions", reps)
        se = _require_number("channel.sensing_error", self.sensing_error)
        if not 0.0 <= se <= 0.5:
            raise ScenarioError(f"channel.sensing_error must lie in [0, 0.5], got {se}")
        if self.eta_nlos_db < self.eta_los_db:
            raise ScenarioError("channel.eta_nlos_db must be >= channel.eta_los_db")

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


_CHANNEL_KEYS = {f.name for f in dataclasses.fields(ChannelParams)}


@dataclass(frozen=True)
class ScenarioParams:
    """Immutable deployment scenario with derived per-step quantities.

    All radii/distances in meters, times in the unit the field name states,
    areas in km^2, densities per km^2.  Derived fields are computed in
    __post_init__ and must not be passed to the constructor.
    """

    forest_area_km2: float = 400.0
    sensor_density_per_km2: float = 180.0
    num_uavs: int = 10
    flag_threshold: int = 1
    fire_speed_m_per_min: float = 20.0
    sensing_radius_m: float = 100.0
    combined_error: float = 0.1
    uav_coverage_radius_m: float = 400.0
    travel_time_min: float = 0.5
    obs_time_s: float = 0.1
    collection_ratio: float = 1.0
    verify_time_min: float = 1.0
    critical_time_min: float = 30.0
    fallback_time_min: float = 30.0
    budget: float = 1.0e7
    sensor_cost: float = 1.0
    uav_cost: float = 1000.0
    damage_coeff: float = 10000.0
    channel: ChannelParams | None = None

    # derived
    n_sensors: float = field(init=False, repr=False, compare=False, default=0.0)
    n_collect: int = field(init=False, repr=False, compare=False, default=0)
    t_step_min: float = field(init=False, repr=False, compare=False, default=0.0)
    t_step_exact: Fraction = field(init=False, repr=False, compare=False, default=Fraction(0))
    n_steps_critical: int = field(init=False, repr=False, compare=False, default=0)
    n_steps_fallback: int = field(init=False, repr=False, compare=False, default=0)

    def __post_init__(self) -> None:
        num = _require_number
        _positive("forest_area_km2", num("forest_area_km2", self.forest_area_km2))
        dens = num("sensor_density_per_km2", self.sensor_density_per_km2)
        if dens < 0.0:
            raise ScenarioError(f"sensor_density_per_km2 must be nonnegative, got {dens}")
        n_u = _require_int("num_uavs", self.num_uavs)
        if n_u < 0:
            raise ScenarioError(f"num_uavs must be nonnegative, got {n_u}")
        object.__setattr__(self, "num_uavs", n_u)
        m_thr = _require_int("flag_threshold", self.flag_threshold)
        if m_thr < 1:
            raise ScenarioError(f"flag_threshold must be >= 1, got {m_thr}")
        object.__setattr__(self, "flag_threshold", m_thr)
        _positive("fire_speed_m_per_min", num("fire_speed_m_per_min", self.fire_speed_m_per_min))
        _positive("sensing_radius_m", num("sensing_radius_m", self.sensing_radius_m))
        eps = num("combined_error", self.combined_error)
        if not 0.0 <= eps <= 0.5:
            raise ScenarioError(f"combined_error must lie in [0, 0.5], got {eps}")
        _positive("uav_coverage_radius_m", num("uav_coverage_radius_m", self.uav_coverage_radius_m))
        _positive("travel_time_min", num("travel_time_min", self.travel_time_min))
        _positive("obs_time_s", num("obs_time_s", self.obs_time_s))
        beta = num("collection_ratio", self.collection_ratio)
        if not 0.0 < beta <= 1.0:
            raise ScenarioError(f"collection_ratio must lie in (0, 1], got {beta}")
        _positive("verify_time_min", num("verify_time_min", self.verify_time_min))
        _positive("critical_time_min", num("critical_time_min", self.critical_time_min))
        _positive("fallback_time_min", num("fallback_time_min", self.fallback_time_min))
        _positive("budget", num("budget", self.budget))
        _positive("sensor_cost", num("sensor_cost", self.sensor_cost))
        _positive("uav_cost", num("uav_cost", self.uav_cost))
        _positive("damage_coeff", num("damage_coeff", self.damage_coeff))

        n_sensors = dens * self.forest_area_km2
        r_km = self.uav_coverage_radius_m / 1000.0
        n_collect = math.floor(beta * dens * math.pi * r_km * r_km)
        if n_collect < m_thr:
            raise ScenarioError(
                f"flag_threshold ({m_thr}) exceeds the {n_collect} observations "
                "collectable per stop; lower the threshold or raise density/coverage"
            )
        t_exact = (
            Fraction(n_collect) * _exact(self.obs_time_s) / 60 + _exact(self.travel_time_min)
        )
        if _exact(self.verify_time_min) < t_exact:
            raise ScenarioError(
                f"verify_time_min ({self.verify_time_min}) must be at least one "
                f"step duration ({float(t_exact)})"
            )
        k_crit = math.floor(_exact(self.critical_time_min) / t_exact)
        k_fall = math.floor(_exact(self.fallback_time_min) / t_exact)
        if k_crit < 1:
            raise ScenarioError("critical_time_min is shorter than one step")
        if k_fall < 1:
            raise ScenarioError("fallback_time_min is shorter than one step")

        object.__setattr__(self, "n_sensors", n_sensors)
        object.__setattr__(self, "n_collect", n_collect)
        object.__setattr__(self, "t_step_exact", t_exact)
        object.__setattr__(self, "t_step_min", float(t_exact))
        object.__setattr__(self, "n_steps_critical", k_crit)
        object.__setattr__(self, "n_steps_fallback", k_fall)

    def to_dict(self) -> dict[str, Any]:
        """Configuration fields only (derived quantities are recomputed on load)."""
        out: dict[str, Any] = {}
        for f in dataclasses.fields(self):
            if not f.init:
                continue
            if f.name == "channel":
                if self.channel is not None:
                    out["channel"] = self.channel.to_dict()
            else:
                out[f.name] = getattr(self, f.name)
        return out

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)


_SCENARIO_KEYS = {f.name for f in dataclasses.fields(ScenarioParams) if f.init}


def _derive_combined_error(cp: ChannelParams) -> float:
    # local import; link_budget has no import back into this module at runtime
    from .link_budget import bpsk_ber, combined_error, repetition_error

    snr = 10.0 ** (cp.target_snr_db / 10.0)
    eps_t = repetition_error(bpsk_ber(snr), cp.repetitions)
    return combined_error(cp.sensing_error, eps_t)


def scenario_from_dict(config: Mapping[str, Any]) -> ScenarioParams:
    """Build a scenario from a mapping, rejecting unknown keys.

    If a `channel` block is present and `combined_error` is not, the per-flag
    error is derived from the channel (sensing error combined with the coded
    transmission error at the target SNR).  An explicit `combined_error` wins
    over the channel-derived value.
    """
    if not isinstance(config, Mapping):
        raise ScenarioError(f"scenario config must be a JSON object, got {type(config).__name__}")
    unknown = sorted(set(config) - _SCENARIO_KEYS)
    if unknown:
        raise ScenarioError(f"unknown scenario keys: {', '.join(unknown)}")

    kwargs = dict(config)
    channel_cfg = kwargs.pop("channel", None)
    channel: ChannelParams | None = None
    if channel_cfg is not None:
        if not isinstance(channel_cfg, Mapping):
            raise ScenarioError("channel must be a JSON object")
        bad = sorted(set(channel_cfg) - _CHANNEL_KEYS)
        if bad:
            raise ScenarioError(f"unknown channel keys: {', '.join(bad)}")
        channel = ChannelParams(**channel_cfg)
        if "combined_error" in kwargs:
            logger.info(
                "combined_error given explicitly; ignoring the channel-derived value"
            )
        else:
            kwargs["combined_error"] = _derive_combined_error(channel)
    return ScenarioParams(channel=channel, **kwargs)


def scenario_from_json(text: str) -> ScenarioParams:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc}") from exc
    return scenario_from_dict(data)


def load_scenario(path: str | os.PathLike[str]) -> ScenarioParams:
    """Load a scenario from a JSON file; an empty object gives the defaults."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from exc
    return scenario_from_json(text)


def derived_step_count(params: ScenarioParams, horizon_min: float) -> int:
    """Number of whole UAV steps fitting in a horizon (exact rational floor)."""
    if not horizon_min > 0.0:
        raise ScenarioError(f"horizon_min must be positive, got {horizon_min}")
    k = math.floor(_exact(horizon_min) / params.t_step_exact)
    if k < 1:
        raise ScenarioError(
            f"horizon {horizon_min} min is shorter than one step ({params.t_step_min} min)"
        )
    return k
