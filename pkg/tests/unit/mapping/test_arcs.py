from __future__ import annotations

import numpy as np
import pytest

from thzmap.channel import enumerate_paths, synthesize_response
from thzmap.estimation import compute_padp, max_search_baseline, to_cir
from thzmap.mapping import (
    ArcModel,
    arc_for_corner,
    arcs_for_scene,
    detect_spurious_arcs,
    mpcs_to_points,
    remove_spurious,
)
from thzmap.scene import (
    CornerFeature,
    FrequencyGrid,
    Point2,
    TrxConfig,
    WallSegment,
    build_scene,
    nearest_surface_distances,
)
from tests.unit.mapping.support import TRX, cloud_of, estimate_at, estimate_towards


def _arc_estimates(radius: float = 2.77, start: float = 70.0, span: float = 35.0, count: int = 40):
    return [estimate_at(radius, azimuth) for azimuth in np.linspace(start, start + span, count)]


def _wall_estimates(y: float = 4.0, count: int = 200):
    return [estimate_towards(x, y) for x in np.linspace(-2.0, 2.0, count)]


def _corner_scene():
    walls = [
        WallSegment(id="upper", a=Point2(x=3.0, y=0.0), b=Point2(x=1.5, y=1.5), material_name="Cement"),
        WallSegment(id="lower", a=Point2(x=3.0, y=0.0), b=Point2(x=1.5, y=-1.5), material_name="Cement"),
    ]
    trx = TrxConfig(scan_start_deg=-60.0, scan_stop_deg=60.0)
    return build_scene(walls, trx, FrequencyGrid(f_start=290e9, f_stop=310e9, n_points=801))


def test_synthetic_arc_is_detected_once() -> None:
    cloud = cloud_of(_arc_estimates() + _wall_estimates())
    arcs = detect_spurious_arcs(cloud)
    assert len(arcs) == 1
    assert arcs[0].radius == pytest.approx(2.77, abs=0.015)
    assert arcs[0].width_deg == pytest.approx(35.0, abs=1e-6)
    assert arcs[0].support_count == 40
    assert arcs[0].center == TRX.position


def test_straight_wall_has_no_arcs() -> None:
    assert detect_spurious_arcs(cloud_of(_wall_estimates())) == []


def test_narrow_cluster_is_not_an_arc() -> None:
    cloud = cloud_of(_arc_estimates(span=10.0, count=20))
    assert detect_spurious_arcs(cloud) == []


def test_empty_cloud_has_no_arcs() -> None:
    assert detect_spurious_arcs(cloud_of([])) == []


def test_known_corner_arc_radius() -> None:
    corner = CornerFeature(apex=Point2(x=0.0, y=3.0), wall_ids=("a", "b"), direct_distance_d=3.0)
    arc = arc_for_corner(corner, TrxConfig(uca_radius=0.23))
    assert arc.radius == pytest.approx(2.77)
    assert arc.angular_span == pytest.approx((78.0, 102.0))


def test_arc_span_wraps_through_zero() -> None:
    arc = ArcModel(center=Point2(x=0.0, y=0.0), radius=1.0, angular_span=(350.0, 10.0))
    assert arc.width_deg == pytest.approx(20.0)
    assert arc.contains(np.array([355.0, 0.0, 5.0, 20.0, 180.0])).tolist() == [True, True, True, False, False]
    assert bool(arc.contains(14.0, pad_deg=4.0))


def test_all_points_on_one_arc_are_flagged() -> None:
    cloud = cloud_of(_arc_estimates())
    cleaned = remove_spurious(cloud, detect_spurious_arcs(cloud))
    assert cleaned.spurious_mask().all()


def test_distant_wall_points_are_retained() -> None:
    cloud = cloud_of(_arc_estimates() + _wall_estimates())
    cleaned = remove_spurious(cloud, detect_spurious_arcs(cloud))
    flags = cleaned.spurious_mask()
    assert flags[:40].all()
    assert not flags[40:].any()


def test_candidates_next_to_a_dense_surface_are_exempted() -> None:
    # a wall tangent to the arc near 90° shares its radius over the central stretch
    cloud = cloud_of([estimate_towards(x, 3.0) for x in np.linspace(-1.0, 1.0, 201)])
    arc = ArcModel(center=TRX.position, radius=2.77, angular_span=(60.0, 120.0))
    flags = remove_spurious(cloud, [arc]).spurious_mask()
    candidates = np.abs(cloud.echo_ranges() - 2.77) <= 0.03
    assert flags[100]
    assert not flags[~candidates].any()
    assert (candidates & ~flags).any()


def test_removal_is_idempotent() -> None:
    cloud = cloud_of(_arc_estimates() + _wall_estimates())
    arcs = detect_spurious_arcs(cloud)
    once = remove_spurious(cloud, arcs)
    twice = remove_spurious(once, arcs)
    assert twice.spurious_mask().tolist() == once.spurious_mask().tolist()


def test_no_arcs_leaves_cloud_untouched() -> None:
    cloud = cloud_of(_wall_estimates())
    assert remove_spurious(cloud, []) is cloud


def test_corner_arc_is_removed_from_baseline_map() -> None:
    scene = _corner_scene()
    response = synthesize_response(enumerate_paths(scene), scene.grid, scene.trx)
    cloud = mpcs_to_points(max_search_baseline(compute_padp(to_cir(response)), scene.trx), scene.trx)
    corner_range = scene.corners[0].direct_distance_d - scene.trx.uca_radius
    from_corner = np.abs(cloud.echo_ranges() - corner_range) < 0.015
    on_walls = ~from_corner & (nearest_surface_distances(cloud.positions(), scene) < 0.02)
    assert from_corner.sum() >= 5

    cleaned = remove_spurious(cloud, arcs_for_scene(scene), hpbw_deg=scene.trx.hpbw_deg)
    flags = cleaned.spurious_mask()
    assert flags[from_corner].mean() >= 0.95
    if on_walls.any():
        assert flags[on_walls].mean() <= 0.05

    detected = detect_spurious_arcs(cloud, hpbw_deg=scene.trx.hpbw_deg)
    assert any(abs(arc.radius - corner_range) <= 0.015 for arc in detected)


def _random_corner_scene(rng: np.random.Generator):
    """Right-angle corner at a random distance and bearing, opening towards the TRx."""
    distance = rng.uniform(2.5, 4.0)
    bearing = rng.uniform(-30.0, 30.0)
    apex = distance * np.array([np.cos(np.radians(bearing)), np.sin(np.radians(bearing))])
    length = distance / np.sqrt(2.0)
    walls = []
    for wall_id, turn in (("upper", 135.0), ("lower", 225.0)):
        heading = np.radians(bearing + turn)
        end = apex + length * np.array([np.cos(heading), np.sin(heading)])
        walls.append(WallSegment(id=wall_id, a=Point2.of(apex), b=Point2.of(end), material_name="Cement"))
    trx = TrxConfig(scan_start_deg=round(bearing) - 60.0, scan_stop_deg=round(bearing) + 60.0)
    return build_scene(walls, trx, FrequencyGrid(f_start=290e9, f_stop=310e9, n_points=801))


@pytest.mark.parametrize("seed", range(20))
def test_random_corner_arcs_are_removed_from_baseline_map(seed: int) -> None:
    scene = _random_corner_scene(np.random.default_rng(seed))
    assert len(scene.corners) == 1
    response = synthesize_response(enumerate_paths(scene), scene.grid, scene.trx)
    cloud = mpcs_to_points(max_search_baseline(compute_padp(to_cir(response)), scene.trx), scene.trx)
    corner_range = scene.corners[0].direct_distance_d - scene.trx.uca_radius
    from_corner = np.abs(cloud.echo_ranges() - corner_range) < 0.015
    on_walls = ~from_corner & (nearest_surface_distances(cloud.positions(), scene) < 0.02)
    assert from_corner.sum() >= 5

    flags = remove_spurious(cloud, arcs_for_scene(scene), hpbw_deg=scene.trx.hpbw_deg).spurious_mask()
    assert flags[from_corner].mean() >= 0.95
    if on_walls.any():
        assert flags[on_walls].mean() <= 0.05
