from __future__ import annotations

import math

import numpy as np
import pytest

from thzmap.channel import PathKind, enumerate_paths
from thzmap.estimation import MpcEstimate
from thzmap.mapping import mpcs_to_points, ranging_error
from thzmap.scene import Point2, TrxConfig, WallSegment, build_scene, nearest_surface_distances
from tests.unit.mapping.support import estimate_at


def test_twenty_nanoseconds_at_ninety_degrees() -> None:
    trx = TrxConfig(position=Point2(x=0.0, y=-0.23), uca_radius=0.23)
    cloud = mpcs_to_points([MpcEstimate.of(1.0, 20e-9, math.pi / 2)], trx)
    point = cloud.points[0]
    assert point.position.x == pytest.approx(0.0, abs=1e-12)
    assert point.position.y == pytest.approx(2.99792458)
    assert point.distance_d_e == pytest.approx(2.99792458)
    assert point.azimuth_deg == pytest.approx(90.0)


def test_zero_delay_sits_on_the_array_rim() -> None:
    cloud = mpcs_to_points([estimate_at(0.0, 0.0)], TrxConfig())
    assert cloud.points[0].position.x == pytest.approx(0.23)
    assert cloud.points[0].position.y == pytest.approx(0.0)


def test_power_cutoff_drops_weak_estimates() -> None:
    estimates = [estimate_at(2.0, 10.0, power_db=-50.0), estimate_at(2.0, 20.0, power_db=-70.0)]
    cloud = mpcs_to_points(estimates, TrxConfig(), power_cutoff_db=-60.0)
    assert len(cloud) == 1
    assert cloud.points[0].source == estimates[0]
    assert cloud.trx_position == TrxConfig().position


def test_exact_wall_paths_land_on_their_walls() -> None:
    walls = [
        WallSegment(id="back", a=Point2(x=-2.0, y=3.0), b=Point2(x=2.6, y=3.0), material_name="Cement"),
        WallSegment(id="side", a=Point2(x=2.6, y=-0.5), b=Point2(x=2.6, y=3.0), material_name="Cement"),
    ]
    scene = build_scene(walls, TrxConfig())
    paths = [item for item in enumerate_paths(scene) if item.kind is PathKind.WALL_SCATTER]
    estimates = [MpcEstimate.of(item.alpha, item.tau, item.theta) for item in paths]
    distances = nearest_surface_distances(mpcs_to_points(estimates, scene.trx).positions(), scene)
    assert np.all(distances <= 0.01 + 1e-6)


def test_ranging_is_rotation_invariant() -> None:
    trx = TrxConfig()
    wall = WallSegment(id="back", a=Point2(x=-2.0, y=3.0), b=Point2(x=2.0, y=3.0), material_name="Cement")
    estimates = [estimate_at(2.80, 80.0), estimate_at(2.76, 95.0), estimate_at(2.90, 100.0)]
    reference = ranging_error(mpcs_to_points(estimates, trx), build_scene([wall], trx))

    angle = math.radians(33.0)
    rotation = np.array([[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]])
    rotated_wall = wall.model_copy(
        update={"a": Point2.of(rotation @ wall.a.as_array()), "b": Point2.of(rotation @ wall.b.as_array())}
    )
    rotated = [MpcEstimate.of(item.alpha, item.tau, item.theta + angle) for item in estimates]
    report = ranging_error(mpcs_to_points(rotated, trx), build_scene([rotated_wall], trx))
    assert report.mde_cm == pytest.approx(reference.mde_cm, abs=1e-9)
    assert report.rmse_cm == pytest.approx(reference.rmse_cm, abs=1e-9)


def test_with_flags_keeps_order() -> None:
    cloud = mpcs_to_points([estimate_at(1.0, 10.0), estimate_at(2.0, 20.0)], TrxConfig())
    flagged = cloud.with_flags([False, True])
    assert flagged.spurious_mask().tolist() == [False, True]
    assert [point.source for point in flagged.points] == [point.source for point in cloud.points]
    with pytest.raises(ValueError):
        cloud.with_flags([True])
