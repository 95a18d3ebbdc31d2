"""Air-to-ground link budget: LoS probability, mean SNR, BER, altitude design.

The LoS model is the standard sigmoid in the elevation angle (degrees); the
mean path loss mixes the LoS/NLoS excess attenuations by the LoS probability.
Uncoded BPSK bit errors Q(sqrt(2*SNR)) are reduced by odd-repetition majority
voting, then combined with the sensing error into the single per-flag error
probability the detection chain consumes.

`optimize_altitude` solves the coverage design: the largest ground radius R
such that a sensor at the coverage edge still meets the target SNR, maximized
over the hover altitude.  At a fixed altitude the SNR decreases strictly with
slant range (both the power law and the LoS mixture fall), so the edge radius
is found by bisection on a bracket grown geometrically; the altitude itself is
found by golden-section search, the radius-vs-altitude profile being unimodal
(too low loses LoS, too high loses power).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .binomial import binomial_tail
from .errors import InfeasibleError, ScenarioError
from .scenario import ChannelParams

__all__ = [
    "db_to_linear",
    "los_probability",
    "average_snr",
    "bpsk_ber",
    "repetition_error",
    "combined_error",
    "coverage_radius_at_height",
    "optimize_altitude",
    "AltitudeDesign",
]

_H_MIN_M = 1.0
_H_MAX_M = 10_000.0


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def los_probability(cp: ChannelParams, height_m: float, slant_m: float) -> float:
    """Line-of-sight probability for a ground node at slant range `slant_m`.

    The elevation angle enters the sigmoid in degrees.
    """
    if height_m <= 0.0 or slant_m <= 0.0:
        raise ScenarioError("height_m and slant_m must be positive")
    arg = min(1.0, height_m / slant_m)
    theta_deg = math.degrees(math.asin(arg))
    return 1.0 / (1.0 + cp.env_a * math.exp(-cp.env_b * (theta_deg - cp.env_a)))


def average_snr(cp: ChannelParams, height_m: float, slant_m: float) -> float:
    """Mean linear SNR at slant range `slant_m` from a UAV hovering at `height_m`."""
    p_los = los_probability(cp, height_m, slant_m)
    rx_over_noise = db_to_linear(cp.tx_power_dbm - cp.noise_dbm)
    eta_los = db_to_linear(cp.eta_los_db)
    eta_nlos = db_to_linear(cp.eta_nlos_db)
    path = slant_m ** (-cp.path_loss_exp)
    return rx_over_noise * path * (p_los / eta_los + (1.0 - p_los) / eta_nlos)


def bpsk_ber(snr_linear: float) -> float:
    """Uncoded BPSK bit error rate Q(sqrt(2*SNR)) = erfc(sqrt(SNR))/2."""
    if snr_linear < 0.0:
        raise ScenarioError(f"snr_linear must be nonnegative, got {snr_linear}")
    return 0.5 * math.erfc(math.sqrt(snr_linear))


def repetition_error(bit_error: float, repetitions: int) -> float:
    """Majority-vote error after an odd number of repetitions of each bit."""
    if repetitions < 1 or repetitions % 2 == 0:
        raise ScenarioError(f"repetitions must be a positive odd integer, got {repetitions}")
    if not 0.0 <= bit_error <= 1.0:
        raise ScenarioError(f"bit_error must lie in [0, 1], got {bit_error}")
    return binomial_tail(repetitions, (repetitions + 1) // 2, bit_error)


def combined_error(sensing_error: float, transmission_error: float) -> float:
    """Probability a delivered flag is wrong: exactly one of the two stages flips it."""
    for name, p in (("sensing_error", sensing_error), ("transmission_error", transmission_error)):
        if not 0.0 <= p <= 1.0:
            raise ScenarioError(f"{name} must lie in [0, 1], got {p}")
    return sensing_error * (1.0 - transmission_error) + (1.0 - sensing_error) * transmission_error


def coverage_radius_at_height(
    cp: ChannelParams, height_m: float, target_snr_db: float | None = None
) -> float:
    """Largest ground radius whose edge still meets the target SNR, or -1 if none.

    Returns -1.0 when even the point directly below the UAV misses the target
    at this altitude (infeasible height), 0.0 would mean exactly the nadir.
    """
    if height_m <= 0.0:
        raise ScenarioError(f"height_m must be positive, got {height_m}")
    target = db_to_linear(cp.target_snr_db if target_snr_db is None else target_snr_db)
    if average_snr(cp, height_m, height_m) < target:
        return -1.0
    # grow the slant bracket until the target is violated
    w_lo = height_m
    w_hi = height_m * 2.0
    while average_snr(cp, height_m, w_hi) >= target:
        w_hi *= 2.0
        if w_hi > 1e12:
            raise InfeasibleError("edge SNR never drops below target; check path_loss_exp")
    # bisect on the boundary; tolerance far below the 1e-6 relative SNR check
    for _ in range(200):
        w_mid = 0.5 * (w_lo + w_hi)
        if average_snr(cp, height_m, w_mid) >= target:
            w_lo = w_mid
        else:
            w_hi = w_mid
        if w_hi - w_lo <= 1e-12 * w_hi:
            break
    w_edge = w_lo
    return math.sqrt(max(w_edge * w_edge - height_m * height_m, 0.0))


@dataclass(frozen=True)
class AltitudeDesign:
    height_m: float
    radius_m: float
    target_snr_db: float


def optimize_altitude(cp: ChannelParams, target_snr_db: float | None = None) -> AltitudeDesign:
    """Altitude maximizing the target-SNR coverage radius, by golden section.

    Raises InfeasibleError when no altitude in [1 m, 10 km] can meet the
    target even at the nadir.
    """
    target_db = cp.target_snr_db if target_snr_db is None else target_snr_db

    def radius(h: float) -> float:
        return coverage_radius_at_height(cp, h, target_db)

    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = _H_MIN_M, _H_MAX_M
    c = b - (b - a) * inv_phi
    d = a + (b - a) * inv_phi
    fc, fd = radius(c), radius(d)
    for _ in range(120):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - (b - a) * inv_phi
            fc = radius(c)
        else:
            a, c, fc = c, d, fd
            d = a + (b - a) * inv_phi
            fd = radius(d)
        if b - a <= 1e-7 * max(b, 1.0):
            break
    h_best = 0.5 * (a + b)
    r_best = radius(h_best)
    for h, r in ((c, fc), (d, fd)):
        if r > r_best:
            h_best, r_best = h, r
    if r_best < 0.0:
        raise InfeasibleError(
            f"target SNR {target_db} dB unattainable at any altitude in "
            f"[{_H_MIN_M} m, {_H_MAX_M} m]"
        )
    return AltitudeDesign(height_m=h_best, radius_m=r_best, target_snr_db=target_db)
