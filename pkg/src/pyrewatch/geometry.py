"""Fire-front geometry and circle-overlap areas.

At step k the burned disk has radius R_f = v*T*k; sensors detect the fire
inside the annulus [R_f, R_f + d_s] (burned sensors are dead, the detection
band rides the front).  A UAV whose coverage disk of radius R_hov can touch
that annulus must hover with its center inside the ring
[max(0, R_f - R_hov), R_f + d_s + R_hov].

All areas here are closed-form circular-lens intersections; no quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ScenarioError
from .scenario import ScenarioParams

__all__ = [
    "FireGeometry",
    "fire_geometry_at",
    "circle_intersection_area",
    "detection_overlap_area",
    "sensors_in_overlap",
]


@dataclass(frozen=True)
class FireGeometry:
    """Radii (meters) describing step k of the spreading fire."""

    step: int
    r_fire_m: float          # burned-disk radius
    r_sense_m: float         # outer edge of the detecting annulus
    r_ring_inner_m: float    # innermost useful UAV hover distance
    r_ring_outer_m: float    # outermost useful UAV hover distance
    ring_area_km2: float     # area of the useful hover ring


def fire_geometry_at(params: ScenarioParams, k: int) -> FireGeometry:
    """Geometry of step k >= 0 (k = 0 is the ignition instant)."""
    if k < 0:
        raise ScenarioError(f"step index must be nonnegative, got {k}")
    r_hov = params.uav_coverage_radius_m
    r_fire = params.fire_speed_m_per_min * params.t_step_min * k
    r_sense = r_fire + params.sensing_radius_m
    r_inner = max(0.0, r_fire - r_hov)
    r_outer = r_sense + r_hov
    ring_area = math.pi * (r_outer * r_outer - r_inner * r_inner) * 1e-6
    return FireGeometry(
        step=k,
        r_fire_m=r_fire,
        r_sense_m=r_sense,
        r_ring_inner_m=r_inner,
        r_ring_outer_m=r_outer,
        ring_area_km2=ring_area,
    )


def circle_intersection_area(r1: float, r2: float, dist: float) -> float:
    """Area of the intersection of two circles with center distance `dist`.

    Standard two-segment lens formula; degenerate configurations (disjoint,
    contained, zero radius) resolve to their exact limits.
    """
    if r1 < 0.0 or r2 < 0.0 or dist < 0.0:
        raise ScenarioError("circle radii and distance must be nonnegative")
    if r1 == 0.0 or r2 == 0.0:
        return 0.0
    if dist >= r1 + r2:
        return 0.0
    small = min(r1, r2)
    if dist <= abs(r1 - r2):
        return math.pi * small * small
    x1 = (dist * dist + r1 * r1 - r2 * r2) / (2.0 * dist)
    x2 = dist - x1
    a1 = math.acos(max(-1.0, min(1.0, x1 / r1)))
    a2 = math.acos(max(-1.0, min(1.0, x2 / r2)))
    half_chord_sq = r1 * r1 - x1 * x1
    return r1 * r1 * a1 + r2 * r2 * a2 - dist * math.sqrt(max(half_chord_sq, 0.0))


def detection_overlap_area(geom: FireGeometry, r_hov_m: float, center_dist_m: float) -> float:
    """Area (m^2) of coverage-disk overlap with the detecting annulus.

    The annulus [r_fire, r_sense] seen by a coverage disk of radius r_hov_m
    hovering center_dist_m from the fire center: outer lens minus inner lens.
    """
    outer = circle_intersection_area(geom.r_sense_m, r_hov_m, center_dist_m)
    inner = circle_intersection_area(geom.r_fire_m, r_hov_m, center_dist_m)
    return max(0.0, outer - inner)


def sensors_in_overlap(params: ScenarioParams, geom: FireGeometry, center_dist_m: float) -> int:
    """Expected whole count of detecting sensors among the N collected.

    floor(density * overlap area), clamped to [0, N]: a stop cannot collect
    more detecting observations than it collects observations.
    """
    area_km2 = detection_overlap_area(geom, params.uav_coverage_radius_m, center_dist_m) * 1e-6
    n = math.floor(params.sensor_density_per_km2 * area_km2)
    return max(0, min(params.n_collect, n))
