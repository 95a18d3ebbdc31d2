"""Circle-overlap closed forms against quadrature and Monte Carlo oracles."""

import math

import numpy as np
import pytest

import pyrewatch as pw
from pyrewatch.errors import ScenarioError
from pyrewatch.geometry import (
    FireGeometry,
    circle_intersection_area,
    detection_overlap_area,
    fire_geometry_at,
    sensors_in_overlap,
)

from _oracles import lens_area_by_quadrature


def test_lens_matches_quadrature_on_random_triples(rng):
    for _ in range(200):
        r1 = float(rng.uniform(0.05, 3.0))
        r2 = float(rng.uniform(0.05, 3.0))
        d = float(rng.uniform(0.0, 1.2 * (r1 + r2)))
        ours = circle_intersection_area(r1, r2, d)
        ref = lens_area_by_quadrature(r1, r2, d)
        assert ours == pytest.approx(ref, rel=1e-6, abs=1e-12)


def test_lens_exact_limits():
    # containment: the smaller disk is swallowed whole
    assert circle_intersection_area(2.0, 0.5, 1.0) == math.pi * 0.25
    assert circle_intersection_area(0.5, 2.0, 1.0) == math.pi * 0.25
    # internal tangency sits exactly on the containment branch
    assert circle_intersection_area(2.0, 0.5, 1.5) == math.pi * 0.25
    # external tangency and disjoint are exactly zero
    assert circle_intersection_area(1.0, 1.0, 2.0) == 0.0
    assert circle_intersection_area(1.0, 1.0, 5.0) == 0.0
    # zero radius contributes nothing
    assert circle_intersection_area(0.0, 1.0, 0.5) == 0.0
    assert circle_intersection_area(1.0, 0.0, 0.5) == 0.0
    # coincident equal circles
    assert circle_intersection_area(1.5, 1.5, 0.0) == pytest.approx(math.pi * 2.25, rel=1e-15)


def test_lens_symmetry_and_bounds(rng):
    for _ in range(100):
        r1 = float(rng.uniform(0.1, 2.0))
        r2 = float(rng.uniform(0.1, 2.0))
        d = float(rng.uniform(0.0, r1 + r2))
        a = circle_intersection_area(r1, r2, d)
        # near-tangency configurations cancel heavily, so symmetry is only
        # good to the cancellation level, not machine epsilon
        assert a == pytest.approx(circle_intersection_area(r2, r1, d), rel=1e-9, abs=1e-12)
        assert 0.0 <= a <= math.pi * min(r1, r2) ** 2 + 1e-12


def test_lens_rejects_negative_arguments():
    for bad in ((-1.0, 1.0, 0.5), (1.0, -1.0, 0.5), (1.0, 1.0, -0.5)):
        with pytest.raises(ScenarioError):
            circle_intersection_area(*bad)


def test_fire_geometry_exact_values(params):
    g0 = fire_geometry_at(params, 0)
    assert g0.r_fire_m == 0.0
    assert g0.r_sense_m == params.sensing_radius_m
    assert g0.r_ring_inner_m == 0.0
    assert g0.r_ring_outer_m == params.sensing_radius_m + params.uav_coverage_radius_m

    g = fire_geometry_at(params, 46)
    assert g.r_fire_m == pytest.approx(20.0 * 0.65 * 46, rel=1e-15)
    assert g.r_sense_m == pytest.approx(g.r_fire_m + 100.0, rel=1e-15)
    assert g.r_ring_inner_m == pytest.approx(g.r_fire_m - 400.0, rel=1e-15)
    assert g.r_ring_outer_m == pytest.approx(g.r_sense_m + 400.0, rel=1e-15)
    expect_km2 = math.pi * (g.r_ring_outer_m**2 - g.r_ring_inner_m**2) * 1e-6
    assert g.ring_area_km2 == pytest.approx(expect_km2, rel=1e-15)

    # the inner edge clamps at the fire center while the fire is small
    g5 = fire_geometry_at(params, 5)
    assert g5.r_fire_m == pytest.approx(65.0, rel=1e-15)
    assert g5.r_ring_inner_m == 0.0

    with pytest.raises(ScenarioError):
        fire_geometry_at(params, -1)


def test_overlap_area_against_point_sampling(rng, params):
    # sample points uniformly in the hover disk; the hit fraction against the
    # detecting annulus estimates the overlap area
    r_hov = params.uav_coverage_radius_m
    for k, d in ((5, 300.0), (20, 500.0), (46, 900.0), (46, 1400.0)):
        geom = fire_geometry_at(params, k)
        n = 400_000
        r = r_hov * np.sqrt(rng.random(n))
        phi = rng.uniform(0.0, 2.0 * math.pi, n)
        dist = np.hypot(d + r * np.cos(phi), r * np.sin(phi))
        frac = np.mean((dist >= geom.r_fire_m) & (dist <= geom.r_sense_m))
        est = frac * math.pi * r_hov * r_hov
        sigma = math.pi * r_hov * r_hov * math.sqrt(max(frac * (1 - frac), 1e-12) / n)
        ours = detection_overlap_area(geom, r_hov, d)
        assert abs(ours - est) < 5.0 * sigma + 1e-9


def test_overlap_area_limits(params):
    geom = fire_geometry_at(params, 46)
    r_hov = params.uav_coverage_radius_m
    # far outside the ring there is nothing to see
    assert detection_overlap_area(geom, r_hov, geom.r_ring_outer_m + 1.0) == 0.0
    # deep inside the burned disk the coverage sees only dead ground
    if geom.r_fire_m > r_hov:
        assert detection_overlap_area(geom, r_hov, 0.0) == 0.0
    # a disk fully inside the annulus sees its whole area
    mid = (geom.r_fire_m + geom.r_sense_m) / 2.0
    width = geom.r_sense_m - geom.r_fire_m
    tiny = width / 4.0
    assert detection_overlap_area(geom, tiny, mid) == pytest.approx(
        math.pi * tiny * tiny, rel=1e-12
    )


def test_sensors_in_overlap_floor_and_clamp(params):
    geom = fire_geometry_at(params, 46)
    d = geom.r_fire_m + 50.0
    area_km2 = detection_overlap_area(geom, params.uav_coverage_radius_m, d) * 1e-6
    expect = math.floor(params.sensor_density_per_km2 * area_km2)
    got = sensors_in_overlap(params, geom, d)
    assert got == min(params.n_collect, max(0, expect))

    # no overlap means no detecting sensors
    assert sensors_in_overlap(params, geom, geom.r_ring_outer_m + 10.0) == 0

    # with a reduced collection ratio the whole-disk count exceeds the
    # collection size and clamps there
    import dataclasses

    half = dataclasses.replace(params, collection_ratio=0.5)
    everything = FireGeometry(
        step=1, r_fire_m=0.0, r_sense_m=1e9, r_ring_inner_m=0.0,
        r_ring_outer_m=1e9, ring_area_km2=1.0,
    )
    assert half.n_collect == 45
    assert sensors_in_overlap(half, everything, 0.0) == 45


def test_geometry_dataclass_is_frozen(params):
    geom = fire_geometry_at(params, 3)
    assert isinstance(geom, FireGeometry)
    with pytest.raises(Exception):
        geom.r_fire_m = 0.0


def test_ring_grows_every_step(params):
    areas = [fire_geometry_at(params, k).ring_area_km2 for k in range(1, 47)]
    assert all(b > a for a, b in zip(areas, areas[1:]))
    assert isinstance(pw.scenario_from_dict({}), type(params))
