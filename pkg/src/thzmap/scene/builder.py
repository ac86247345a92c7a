"""Scene construction from descriptions, with corner derivation."""

from __future__ import annotations

import hashlib
import itertools
import json
import logging
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np
from pydantic import ValidationError

from thzmap.scene.errors import SceneError
from thzmap.scene.geometry import azimuth, distances_to_walls, segment_intersection
from thzmap.scene.models import CornerFeature, FrequencyGrid, Point2, Scene, TrxConfig, WallSegment

logger = logging.getLogger(__name__)

APEX_TOLERANCE_M = 1e-9
ARM_MIN_LENGTH_M = 1e-9


def build_scene(
    walls: Sequence[WallSegment],
    trx: TrxConfig,
    grid: FrequencyGrid | None = None,
    corners: Sequence[CornerFeature] | None = None,
) -> Scene:
    """Validate walls against the TRx and derive the concave corners.

    Passing ``corners`` overrides derivation; each declared apex must lie on
    both referenced walls.
    """
    if not walls:
        raise SceneError("scene needs at least one wall")
    clearance = distances_to_walls(trx.position.as_array(), walls)[0]
    for wall, distance in zip(walls, clearance):
        if distance <= trx.uca_radius:
            raise SceneError(f"wall {wall.id} passes through the TRx array disc")
    pairs = _validated_pairs(walls)
    if corners is None:
        derived = _derive_corners(pairs, trx)
    else:
        derived = tuple(_check_declared_corner(corner, walls, trx) for corner in corners)
    ordered = tuple(sorted(derived, key=lambda corner: _corner_sort_key(corner, trx)))
    try:
        return Scene(walls=tuple(walls), corners=ordered, trx=trx, grid=grid or FrequencyGrid())
    except ValidationError as exc:
        raise SceneError(f"invalid scene: {exc.errors()[0]['msg']}") from exc


def scene_from_mapping(description: Mapping[str, Any]) -> Scene:
    """Build a scene from the JSON description format."""
    try:
        walls = tuple(
            _wall_from_mapping(index, raw) for index, raw in enumerate(description["walls"])
        )
        trx = _trx_from_mapping(description.get("trx", {}))
        grid = _grid_from_mapping(description.get("frequency"))
        corners = _corners_from_mapping(description.get("corners"), walls, trx)
    except KeyError as exc:
        raise SceneError(f"missing scene field: {exc.args[0]}") from exc
    except (TypeError, ValidationError) as exc:
        raise SceneError(f"invalid scene description: {exc}") from exc
    return build_scene(walls, trx, grid, corners)


def load_scene(path: str | Path) -> Scene:
    scene_path = Path(path)
    if not scene_path.exists():
        raise SceneError(f"scene file not found: {scene_path}")
    try:
        raw = json.loads(scene_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SceneError(f"invalid json in scene file {scene_path}: line {exc.lineno}") from exc
    if not isinstance(raw, dict):
        raise SceneError("scene root must be an object")
    scene = scene_from_mapping(raw)
    logger.info("loaded scene %s: %d walls, %d corners", scene_path, len(scene.walls), len(scene.corners))
    return scene


def scene_hash(scene: Scene) -> str:
    payload = json.dumps(scene.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _validated_pairs(
    walls: Sequence[WallSegment],
) -> tuple[tuple[WallSegment, WallSegment, np.ndarray], ...]:
    pairs = []
    for first, second in itertools.combinations(walls, 2):
        apex = segment_intersection(first, second, APEX_TOLERANCE_M)
        if apex is not None:
            pairs.append((first, second, apex))
    return tuple(pairs)


def _derive_corners(
    pairs: Sequence[tuple[WallSegment, WallSegment, np.ndarray]],
    trx: TrxConfig,
) -> tuple[CornerFeature, ...]:
    corners = []
    for first, second, apex in pairs:
        if not _opens_toward(first, second, apex, trx.position.as_array()):
            continue
        ids = tuple(sorted((first.id, second.id)))
        apex_point = Point2.of(apex)
        corners.append(
            CornerFeature(
                apex=apex_point,
                wall_ids=ids,
                direct_distance_d=apex_point.distance_to(trx.position),
            )
        )
    return tuple(corners)


def _arms(wall: WallSegment, apex: np.ndarray) -> tuple[np.ndarray, ...]:
    arms = []
    for end in (wall.a.as_array(), wall.b.as_array()):
        arm = end - apex
        length = float(np.linalg.norm(arm))
        if length > ARM_MIN_LENGTH_M:
            arms.append(arm / length)
    return tuple(arms)


def _opens_toward(first: WallSegment, second: WallSegment, apex: np.ndarray, origin: np.ndarray) -> bool:
    """True when the origin sits strictly inside a wedge (< 180°) formed by the walls."""
    view = origin - apex
    for arm1 in _arms(first, apex):
        for arm2 in _arms(second, apex):
            basis = np.column_stack((arm1, arm2))
            if abs(np.linalg.det(basis)) < 1e-12:
                continue
            weights = np.linalg.solve(basis, view)
            if np.all(weights > 0.0):
                return True
    return False


def _check_declared_corner(
    corner: CornerFeature,
    walls: Sequence[WallSegment],
    trx: TrxConfig,
) -> CornerFeature:
    by_id = {wall.id: wall for wall in walls}
    referenced = [by_id.get(wall_id) for wall_id in corner.wall_ids]
    if any(wall is None for wall in referenced):
        raise SceneError(f"corner references unknown wall: {corner.wall_ids}")
    distances = distances_to_walls(corner.apex.as_array(), referenced)[0]
    if np.any(distances > APEX_TOLERANCE_M):
        raise SceneError(f"declared corner apex does not lie on walls {corner.wall_ids}")
    return corner.model_copy(update={"direct_distance_d": corner.apex.distance_to(trx.position)})


def _corner_sort_key(corner: CornerFeature, trx: TrxConfig) -> tuple[float, float]:
    return (azimuth(trx.position, corner.apex), corner.direct_distance_d)


def _wall_from_mapping(index: int, raw: Mapping[str, Any]) -> WallSegment:
    fields: dict[str, Any] = {
        "id": str(raw.get("id", f"wall-{index}")),
        "a": Point2.of(raw["a"]),
        "b": Point2.of(raw["b"]),
        "material_name": raw["material"],
        "tag": raw.get("tag"),
    }
    if raw.get("backscatter_db") is not None:
        fields["backscatter_db_per_point"] = float(raw["backscatter_db"])
    return WallSegment(**fields)


def _trx_from_mapping(raw: Mapping[str, Any]) -> TrxConfig:
    fields: dict[str, Any] = {}
    if "position" in raw:
        fields["position"] = Point2.of(raw["position"])
    for key in ("uca_radius", "antenna_gain_dbi", "hpbw_deg", "height_m"):
        if key in raw:
            fields[key] = float(raw[key])
    if "scan" in raw:
        start, step, stop = (float(value) for value in raw["scan"])
        fields.update(scan_start_deg=start, scan_step_deg=step, scan_stop_deg=stop)
    return TrxConfig(**fields)


def _grid_from_mapping(raw: Mapping[str, Any] | None) -> FrequencyGrid:
    if raw is None:
        return FrequencyGrid()
    return FrequencyGrid(
        f_start=float(raw["start_hz"]),
        f_stop=float(raw["stop_hz"]),
        n_points=int(raw["n_points"]),
    )


def _corners_from_mapping(
    raw: Sequence[Mapping[str, Any]] | None,
    walls: Sequence[WallSegment],
    trx: TrxConfig,
) -> tuple[CornerFeature, ...] | None:
    if raw is None:
        return None
    corners = []
    for entry in raw:
        apex = Point2.of(entry["apex"])
        wall_ids = tuple(str(wall_id) for wall_id in entry["walls"])
        if len(wall_ids) != 2:
            raise SceneError("a declared corner references exactly two walls")
        corners.append(
            CornerFeature(apex=apex, wall_ids=wall_ids, direct_distance_d=apex.distance_to(trx.position))
        )
    return tuple(corners)
