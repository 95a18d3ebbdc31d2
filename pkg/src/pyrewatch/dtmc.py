"""Absorbing three-state chain over UAV patrol steps.

States: searching (no alarm yet), verifying (an alarm is being checked on
site), detected (absorbing).  One transition per patrol step of duration T.
A search step raises an alarm with probability p_fa + p_d and the chain moves
to verifying; verification survives a step with probability 1 - T/T_vrf and
otherwise resolves, confirming with odds p_d : p_fa frozen at alarm time's
step probabilities.

`detection_curve` evolves the chain over the horizon with the step
probabilities recomputed at every k (the fire grows, so the chain is
time-inhomogeneous).  The detection mass gained at step k is computed two
independent ways on every step (occupancy difference vs. inflow product) and
the run aborts if they ever disagree beyond 1e-10; this is a permanent
consistency assertion, not a debug check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .detection import QuadratureSpec, StepProbabilities
from .errors import NumericalError, ScenarioError
from .geometry import fire_geometry_at
from .kernels import get_backend
from .output import write_csv
from .scenario import ScenarioParams

__all__ = [
    "StateVector",
    "StepTransition",
    "DetectionCurve",
    "initial_state",
    "build_transition",
    "evolve",
    "detection_curve",
    "CURVE_CSV_SCHEMA",
    "CURVE_CSV_HEADER",
]

_SIMPLEX_TOL = 1e-12
_RHO_TOL = 1e-10

CURVE_CSV_SCHEMA = "pyrewatch.curve.v1"
CURVE_CSV_HEADER = ("k", "t_min", "p_int", "p_fa", "p_d", "pi_D", "rho_D")


@dataclass(frozen=True)
class StateVector:
    """Occupancy distribution over (searching, verifying, detected)."""

    p_searching: float
    p_verifying: float
    p_detected: float

    def __post_init__(self) -> None:
        for name in ("p_searching", "p_verifying", "p_detected"):
            v = getattr(self, name)
            if not -_SIMPLEX_TOL <= v <= 1.0 + _SIMPLEX_TOL:
                raise NumericalError(f"{name} out of [0, 1]: {v}")
        total = self.p_searching + self.p_verifying + self.p_detected
        if abs(total - 1.0) > _SIMPLEX_TOL:
            raise NumericalError(f"state occupancies sum to {total}, not 1")


def initial_state() -> StateVector:
    return StateVector(1.0, 0.0, 0.0)


@dataclass(frozen=True)
class StepTransition:
    """Row-stochastic one-step transition at a given patrol step."""

    step: int
    p_stay_searching: float
    p_alarm: float
    p_resume: float
    p_continue_verify: float
    p_confirm: float

    def __post_init__(self) -> None:
        rows = (
            ("searching", self.p_stay_searching + self.p_alarm),
            ("verifying", self.p_resume + self.p_continue_verify + self.p_confirm),
        )
        for name, total in rows:
            if abs(total - 1.0) > _SIMPLEX_TOL:
                raise NumericalError(f"{name} transition row sums to {total}, not 1")


def build_transition(probs: StepProbabilities, params: ScenarioParams) -> StepTransition:
    """Transition for step k from its single-step alarm probabilities.

    With no alarm mass at all (p_fa = p_d = 0) the verifying state is
    unreachable; its resolution split defaults to resuming the search.
    """
    p_vv = 1.0 - params.t_step_min / params.verify_time_min
    if not 0.0 <= p_vv < 1.0 + _SIMPLEX_TOL:
        raise NumericalError(f"verify continuation probability out of range: {p_vv}")
    alarm = probs.p_false_alarm + probs.p_detect
    if alarm > 1.0:
        raise NumericalError(f"alarm probability exceeds 1: {alarm}")
    leave = 1.0 - p_vv
    if alarm > 0.0:
        confirm = leave * (probs.p_detect / alarm)
        resume = leave * (probs.p_false_alarm / alarm)
    else:
        confirm = 0.0
        resume = leave
    return StepTransition(
        step=probs.step,
        p_stay_searching=1.0 - alarm,
        p_alarm=alarm,
        p_resume=resume,
        p_continue_verify=p_vv,
        p_confirm=confirm,
    )


def evolve(
    state: StateVector, transition: StepTransition, drift_events: list | None = None
) -> StateVector:
    """One chain step; renormalizes (and records) only if drift exceeds 1e-12."""
    n = state.p_searching
    v = state.p_verifying
    n2 = n * transition.p_stay_searching + v * transition.p_resume
    v2 = n * transition.p_alarm + v * transition.p_continue_verify
    d2 = state.p_detected + v * transition.p_confirm
    total = n2 + v2 + d2
    drift = abs(total - 1.0)
    if drift > _SIMPLEX_TOL:
        if drift_events is not None:
            drift_events.append((transition.step, drift))
        n2, v2, d2 = n2 / total, v2 / total, d2 / total
    return StateVector(n2, v2, d2)


@dataclass(frozen=True)
class DetectionCurve:
    """Per-step alarm probabilities and chain occupancies over a horizon."""

    params: ScenarioParams
    steps: np.ndarray          # k = 1..K
    t_min: np.ndarray          # k * T
    p_intersect: np.ndarray
    p_false_alarm: np.ndarray
    p_detect: np.ndarray
    pi_searching: np.ndarray
    pi_verifying: np.ndarray
    pi_detected: np.ndarray
    rho_detected: np.ndarray   # detection mass gained at step k
    renormalizations: int

    def __len__(self) -> int:
        return int(self.steps.size)

    def rows(self):
        for i in range(len(self)):
            yield (
                int(self.steps[i]),
                float(self.t_min[i]),
                float(self.p_intersect[i]),
                float(self.p_false_alarm[i]),
                float(self.p_detect[i]),
                float(self.pi_detected[i]),
                float(self.rho_detected[i]),
            )

    def to_csv(self, path) -> None:
        write_csv(path, CURVE_CSV_SCHEMA, CURVE_CSV_HEADER, self.rows())


def detection_curve(
    params: ScenarioParams,
    quad: QuadratureSpec = QuadratureSpec(),
    n_steps: int | None = None,
    backend: str | None = None,
) -> DetectionCurve:
    """Evolve the chain over n_steps patrol steps (default: the critical horizon).

    The per-step probabilities come from the compiled kernel; the chain loop
    itself is tiny and stays in Python.
    """
    if n_steps is None:
        n_steps = params.n_steps_critical
    if n_steps < 1:
        raise ScenarioError(f"n_steps must be >= 1, got {n_steps}")
    from .binomial import binomial_cdf, binomial_tail

    geoms = [fire_geometry_at(params, k) for k in range(1, n_steps + 1)]
    r_lo = np.array([g.r_ring_inner_m for g in geoms])
    r_hi = np.array([g.r_ring_outer_m for g in geoms])
    r_fire = np.array([g.r_fire_m for g in geoms])
    r_sense = np.array([g.r_sense_m for g in geoms])

    ring = np.array([g.ring_area_km2 for g in geoms])
    p_int = np.clip(params.num_uavs * ring / params.forest_area_km2, 0.0, 1.0)

    mod = get_backend(backend)
    p_cond = mod.conditional_detection_curve(
        r_lo,
        r_hi,
        r_fire,
        r_sense,
        params.uav_coverage_radius_m,
        params.sensor_density_per_km2 * 1e-6,
        params.n_collect,
        params.flag_threshold,
        params.combined_error,
        quad.points,
    )
    p_d = p_int * np.asarray(p_cond)

    n_obs, m_thr, eps = params.n_collect, params.flag_threshold, params.combined_error
    # below the mean the tail is the large side, so subtract the small cdf;
    # above it, sum the small tail directly to dodge cancellation
    noise_tail = (
        1.0 - binomial_cdf(n_obs, m_thr - 1, eps)
        if m_thr <= n_obs * eps
        else binomial_tail(n_obs, m_thr, eps)
    )
    p_fa = (1.0 - p_int) * noise_tail

    pi_n = np.empty(n_steps)
    pi_v = np.empty(n_steps)
    pi_d = np.empty(n_steps)
    rho = np.empty(n_steps)
    drift_events: list = []
    state = initial_state()
    for i in range(n_steps):
        probs = StepProbabilities(
            step=i + 1,
            p_intersect=float(p_int[i]),
            p_detect_given_overlap=float(p_cond[i]),
            p_detect=float(p_d[i]),
            p_false_alarm=float(p_fa[i]),
        )
        tr = build_transition(probs, params)
        inflow = state.p_verifying * tr.p_confirm
        new_state = evolve(state, tr, drift_events)
        gained = new_state.p_detected - state.p_detected
        if not math.isclose(gained, inflow, rel_tol=0.0, abs_tol=_RHO_TOL):
            raise NumericalError(
                f"detection-mass accounting mismatch at step {i + 1}: "
                f"occupancy difference {gained} vs inflow {inflow}"
            )
        pi_n[i] = new_state.p_searching
        pi_v[i] = new_state.p_verifying
        pi_d[i] = new_state.p_detected
        rho[i] = inflow
        state = new_state

    steps = np.arange(1, n_steps + 1)
    return DetectionCurve(
        params=params,
        steps=steps,
        t_min=steps * params.t_step_min,
        p_intersect=p_int,
        p_false_alarm=p_fa,
        p_detect=p_d,
        pi_searching=pi_n,
        pi_verifying=pi_v,
        pi_detected=pi_d,
        rho_detected=rho,
        renormalizations=len(drift_events),
    )
