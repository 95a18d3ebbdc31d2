"""Monte Carlo validation of the analytical detection curve.

Each trial draws one full deployment: a Poisson number of sensors placed
uniformly on the square forest, one ignition point, and fresh uniform UAV
stops inside their partition rectangles every patrol step.  Each step runs a
single alarm test, mirroring how the chain model aggregates the fleet into
one collector: the first stop whose coverage meets the detection ring carries
the test, and when no stop does, stop 0 acts as the pure-noise collector.
The per-stop flag outcome is sampled by counts (hypergeometric subsample of
detecting sensors when coverage exceeds the collection size N, then binomial
flip counts), which has exactly the distribution of flipping each collected
flag independently; only the count of positives matters to the alarm rule.

A raised alarm pauses the whole system for verification, matching the chain's
single verifying state: the dwell is geometric with continuation probability
1 - T/T_vrf, a true alarm (the testing stop sat inside the useful hover ring
at alarm time) absorbs at the resolution step, a false one resumes the search
on the next step.  Detections later than the horizon are not counted.

Boundary handling: `interior-ignition` (default) keeps the ignition at least
one final-step ring radius away from the forest edge, so the growing annulus
never leaves the sensor field; `torus` wraps all distances instead.

Trial seeds are derived host-side from the run seed, so results depend only
on (config, seed), not on worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ScenarioError
from .geometry import fire_geometry_at
from .kernels import get_backend, numba_available, resolve_backend, resolve_threads
from .scenario import ScenarioParams

__all__ = [
    "TrialConfig",
    "TrialOutcome",
    "MonteCarloCurve",
    "run_trials",
    "single_step_frequency",
    "wilson_halfwidth",
]

BOUNDARY_MODES = ("interior-ignition", "torus")

_Z95 = 1.959963984540054


@dataclass(frozen=True)
class TrialConfig:
    """Simulation request: scenario plus trial count, seed and boundary mode."""

    scenario: ScenarioParams
    trials: int = 10_000
    seed: int = 0
    boundary_mode: str = "interior-ignition"

    def __post_init__(self) -> None:
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ScenarioError(f"trials must be a positive integer, got {self.trials}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ScenarioError(f"seed must be a nonnegative integer, got {self.seed}")
        if self.boundary_mode not in BOUNDARY_MODES:
            raise ScenarioError(
                f"boundary_mode must be one of {BOUNDARY_MODES}, got {self.boundary_mode!r}"
            )


@dataclass(frozen=True)
class TrialOutcome:
    detected: bool
    detect_step: int | None
    false_alarm_count: int


@dataclass(frozen=True)
class MonteCarloCurve:
    """Empirical absorption curve with per-step Wilson 95% half-widths."""

    steps: np.ndarray
    t_min: np.ndarray
    pi_detected_mc: np.ndarray
    ci_halfwidth: np.ndarray
    trials: int
    seed: int
    boundary_mode: str
    detect_steps: np.ndarray = field(repr=False)
    false_alarm_counts: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return int(self.steps.size)

    def outcomes(self) -> list[TrialOutcome]:
        return [
            TrialOutcome(
                detected=int(ds) > 0,
                detect_step=int(ds) if ds > 0 else None,
                false_alarm_count=int(fc),
            )
            for ds, fc in zip(self.detect_steps, self.false_alarm_counts)
        ]


def wilson_halfwidth(successes, n: int, z: float = _Z95):
    """Half-width of the Wilson score interval, vectorized over successes."""
    s = np.asarray(successes, dtype=np.float64)
    p = s / n
    den = 1.0 + z * z / n
    return z * np.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / den


def _trial_seeds(seed: int, count: int) -> np.ndarray:
    return np.random.SeedSequence(seed).generate_state(count, dtype=np.uint32)


def _grid_shape(n_uavs: int) -> tuple[int, int]:
    # near-square partition of the forest into n_uavs rectangles
    if n_uavs <= 0:
        return 1, 1
    rows = max(1, int(math.isqrt(n_uavs)))
    while n_uavs % rows:
        rows -= 1
    return rows, n_uavs // rows


def _prepare_backend(backend: str | None):
    name = resolve_backend(backend)
    mod = get_backend(name)
    if name == "numba" and numba_available():
        import numba

        numba.set_num_threads(resolve_threads())
    return mod


def run_trials(
    cfg: TrialConfig, n_steps: int | None = None, backend: str | None = None
) -> MonteCarloCurve:
    """Simulate cfg.trials deployments over the horizon (default: critical)."""
    params = cfg.scenario
    if n_steps is None:
        n_steps = params.n_steps_critical
    if n_steps < 1:
        raise ScenarioError(f"n_steps must be >= 1, got {n_steps}")
    geoms = [fire_geometry_at(params, k) for k in range(1, n_steps + 1)]
    side = math.sqrt(params.forest_area_km2) * 1000.0
    torus = cfg.boundary_mode == "torus"
    margin = 0.0 if torus else geoms[-1].r_ring_outer_m
    if not torus and 2.0 * margin >= side:
        raise ScenarioError(
            f"interior-ignition margin {margin:.0f} m does not fit the "
            f"{side:.0f} m forest side; use boundary_mode='torus' or a larger area"
        )
    rows, cols = _grid_shape(params.num_uavs)
    mod = _prepare_backend(backend)
    seeds = _trial_seeds(cfg.seed, cfg.trials)
    detect_steps, fa_counts = mod.mc_curve_trials(
        seeds,
        n_steps,
        side,
        margin,
        torus,
        np.array([g.r_fire_m for g in geoms]),
        np.array([g.r_sense_m for g in geoms]),
        np.array([g.r_ring_inner_m for g in geoms]),
        np.array([g.r_ring_outer_m for g in geoms]),
        params.uav_coverage_radius_m,
        params.sensor_density_per_km2 * params.forest_area_km2,
        params.n_collect,
        params.flag_threshold,
        params.combined_error,
        1.0 - params.t_step_min / params.verify_time_min,
        params.num_uavs,
        rows,
        cols,
    )
    detect_steps = np.asarray(detect_steps)
    found = detect_steps[detect_steps > 0]
    per_step = np.bincount(found, minlength=n_steps + 1)[1:]
    hits = np.cumsum(per_step)
    steps = np.arange(1, n_steps + 1)
    return MonteCarloCurve(
        steps=steps,
        t_min=steps * params.t_step_min,
        pi_detected_mc=hits / cfg.trials,
        ci_halfwidth=wilson_halfwidth(hits, cfg.trials),
        trials=cfg.trials,
        seed=cfg.seed,
        boundary_mode=cfg.boundary_mode,
        detect_steps=detect_steps,
        false_alarm_counts=np.asarray(fa_counts),
    )


def single_step_frequency(
    cfg: TrialConfig, k: int, backend: str | None = None
) -> tuple[float, float]:
    """Empirical (detection, false-alarm) frequency of one isolated step k.

    Every placement draws a fresh ignition, fresh UAV stops, and a fresh local
    Poisson sensor field inside each coverage disk (not clipped at the forest
    edge: this is an oracle for the per-step closed forms, which ignore edge
    effects, rather than a re-run of the full-field simulation).  Uses
    cfg.trials placements.
    """
    params = cfg.scenario
    if k < 1:
        raise ScenarioError(f"step index must be >= 1, got {k}")
    geom = fire_geometry_at(params, k)
    side = math.sqrt(params.forest_area_km2) * 1000.0
    torus = cfg.boundary_mode == "torus"
    margin = 0.0 if torus else geom.r_ring_outer_m
    if not torus and 2.0 * margin >= side:
        raise ScenarioError(
            f"interior-ignition margin {margin:.0f} m does not fit the forest; "
            "use boundary_mode='torus' or a larger area"
        )
    rows, cols = _grid_shape(params.num_uavs)
    mod = _prepare_backend(backend)
    seeds = _trial_seeds(cfg.seed, cfg.trials)
    lam_disk = (
        params.sensor_density_per_km2
        * 1e-6
        * math.pi
        * params.uav_coverage_radius_m**2
    )
    det, fal = mod.mc_single_step(
        seeds,
        side,
        margin,
        torus,
        geom.r_fire_m,
        geom.r_sense_m,
        geom.r_ring_inner_m,
        geom.r_ring_outer_m,
        params.uav_coverage_radius_m,
        lam_disk,
        params.n_collect,
        params.flag_threshold,
        params.combined_error,
        params.num_uavs,
        rows,
        cols,
    )
    det = np.asarray(det, dtype=np.float64)
    fal = np.asarray(fal, dtype=np.float64)
    return float(det.mean()), float(fal.mean())
