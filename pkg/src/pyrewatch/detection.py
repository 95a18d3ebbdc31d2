"""Per-step alarm probabilities for a single UAV collection stop.

A stop collects N flags; n_in of them come from sensors inside the detecting
annulus (flag truly 1), the rest from outside (flag truly 0), and each flag is
flipped independently with the combined error eps.  The alarm fires when at
least M positives arrive, so the detection probability conditional on the
counts is a Poisson-binomial tail over the two binomial populations.

The unconditional per-step quantities follow the stochastic-geometry model:
the probability the stop lands in the useful hover ring at all, the detection
probability averaged over the ring by an area-weighted radial quadrature, and
the false-alarm probability of a stop that sees no fire.

This module is the scalar reference path; `pyrewatch.kernels` carries the
compiled array versions used by the curve builder.  Both must agree to 1e-12.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .binomial import (
    binomial_cdf,
    binomial_cdf_direct,
    binomial_pmf,
    binomial_tail,
    binomial_tail_direct,
)
from .errors import ScenarioError
from .geometry import FireGeometry, fire_geometry_at, sensors_in_overlap
from .scenario import ScenarioParams

__all__ = [
    "QuadratureSpec",
    "StepProbabilities",
    "intersection_probability",
    "false_alarm_probability",
    "detection_prob_given_counts",
    "detection_prob_given_overlap",
    "step_probabilities",
]


@dataclass(frozen=True)
class QuadratureSpec:
    """Radial quadrature resolution for ring averages."""

    points: int = 200

    def __post_init__(self) -> None:
        if not isinstance(self.points, int) or self.points < 2:
            raise ScenarioError(f"quadrature points must be an integer >= 2, got {self.points}")


@dataclass(frozen=True)
class StepProbabilities:
    """Unconditional single-step alarm probabilities at step k."""

    step: int
    p_intersect: float
    p_detect_given_overlap: float
    p_detect: float
    p_false_alarm: float


def intersection_probability(params: ScenarioParams, geom: FireGeometry) -> float:
    """Probability some UAV stop lands in the useful hover ring, clamped to 1."""
    frac = params.num_uavs * geom.ring_area_km2 / params.forest_area_km2
    return min(1.0, max(0.0, frac))


def false_alarm_probability(
    p_intersect: float, n_obs: int, m_thr: int, eps: float, form: str = "auto"
) -> float:
    """P(alarm at a stop that sees no fire): all N flags are noise.

    `form` selects the algebraic route: "auto" always computes the small side
    directly (the lower tail below the mean, the upper tail above it), so deep
    tails never cancel against 1; "direct"/"complement" force the plain
    one-sided sums for cross-checking.
    """
    if not 0.0 <= p_intersect <= 1.0:
        raise ScenarioError(f"p_intersect must lie in [0, 1], got {p_intersect}")
    if m_thr < 0 or m_thr > n_obs:
        raise ScenarioError(f"need 0 <= m_thr <= n_obs, got m_thr={m_thr}, n_obs={n_obs}")
    if not 0.0 <= eps <= 1.0:
        raise ScenarioError(f"eps must lie in [0, 1], got {eps}")
    if form == "auto":
        tail = (
            1.0 - binomial_cdf(n_obs, m_thr - 1, eps)
            if m_thr <= n_obs * eps
            else binomial_tail(n_obs, m_thr, eps)
        )
    elif form == "direct":
        tail = binomial_tail_direct(n_obs, m_thr, eps)
    elif form == "complement":
        tail = 1.0 - binomial_cdf_direct(n_obs, m_thr - 1, eps)
    else:
        raise ScenarioError(f"unknown form {form!r}")
    return (1.0 - p_intersect) * max(0.0, min(1.0, tail))


def detection_prob_given_counts(
    n_in: int, n_out: int, m_thr: int, eps: float, form: str = "auto"
) -> float:
    """P(at least m_thr positive flags | n_in true positives among n_in+n_out).

    Poisson-binomial tail of Bin(n_in, 1-eps) + Bin(n_out, eps).  "direct"
    sums the upper tail over the true-positive count; "complement" subtracts
    the lower tail; "auto" also takes the m_thr = 1 and eps = 0 shortcuts.
    """
    if n_in < 0 or n_out < 0:
        raise ScenarioError(f"counts must be nonnegative, got n_in={n_in}, n_out={n_out}")
    n_tot = n_in + n_out
    if m_thr < 1 or m_thr > n_tot:
        raise ScenarioError(f"need 1 <= m_thr <= n_in+n_out, got m_thr={m_thr}, total={n_tot}")
    if not 0.0 <= eps <= 1.0:
        raise ScenarioError(f"eps must lie in [0, 1], got {eps}")

    if form == "auto":
        if eps == 0.0:
            return 1.0 if n_in >= m_thr else 0.0
        if m_thr == 1:
            return 1.0 - (eps**n_in) * ((1.0 - eps) ** n_out)
        form = "complement" if m_thr < n_tot / 2 else "direct"
    if form == "direct":
        total = 0.0
        for m_in in range(n_in + 1):
            need = m_thr - m_in
            tail = 1.0 if need <= 0 else binomial_tail(n_out, need, eps)
            total += binomial_pmf(m_in, n_in, 1.0 - eps) * tail
        return min(1.0, total)
    if form == "complement":
        miss = 0.0
        for m_in in range(min(m_thr - 1, n_in) + 1):
            miss += binomial_pmf(m_in, n_in, 1.0 - eps) * binomial_cdf(
                n_out, m_thr - 1 - m_in, eps
            )
        return min(1.0, max(0.0, 1.0 - miss))
    raise ScenarioError(f"unknown form {form!r}")


def detection_prob_given_overlap(
    params: ScenarioParams,
    geom: FireGeometry,
    quad: QuadratureSpec = QuadratureSpec(),
    fast_paths: bool = True,
) -> float:
    """Ring-averaged detection probability of a stop inside the hover ring.

    Area-weighted radial quadrature: the ring [r_lo, r_hi] is sliced at
    r_i = r_lo + (r_hi - r_lo)*i/I and each annular slice contributes its
    area fraction times the detection probability at its outer radius.
    `fast_paths=False` forces the general Poisson-binomial sums everywhere
    (used to pin the shortcut paths against the general one).
    """
    n_obs = params.n_collect
    m_thr = params.flag_threshold
    eps = params.combined_error
    r_lo = geom.r_ring_inner_m
    r_hi = geom.r_ring_outer_m
    denom = r_hi * r_hi - r_lo * r_lo
    if denom <= 0.0:
        raise ScenarioError("hover ring is empty; geometry is degenerate")
    points = quad.points
    total = 0.0
    r_prev = r_lo
    for i in range(1, points + 1):
        r_i = r_lo + (r_hi - r_lo) * i / points
        n_in = sensors_in_overlap(params, geom, r_i)
        if fast_paths:
            p_i = detection_prob_given_counts(n_in, n_obs - n_in, m_thr, eps)
        else:
            form = "complement" if m_thr < n_obs / 2 else "direct"
            p_i = detection_prob_given_counts(n_in, n_obs - n_in, m_thr, eps, form=form)
        total += (r_i * r_i - r_prev * r_prev) / denom * p_i
        r_prev = r_i
    return min(1.0, max(0.0, total))


def step_probabilities(
    params: ScenarioParams, k: int, quad: QuadratureSpec = QuadratureSpec()
) -> StepProbabilities:
    """All single-step alarm probabilities at stop k >= 1."""
    if k < 1:
        raise ScenarioError(f"step index must be >= 1, got {k}")
    geom = fire_geometry_at(params, k)
    p_int = intersection_probability(params, geom)
    p_cond = detection_prob_given_overlap(params, geom, quad)
    p_fa = false_alarm_probability(p_int, params.n_collect, params.flag_threshold, params.combined_error)
    return StepProbabilities(
        step=k,
        p_intersect=p_int,
        p_detect_given_overlap=p_cond,
        p_detect=p_int * p_cond,
        p_false_alarm=p_fa,
    )
