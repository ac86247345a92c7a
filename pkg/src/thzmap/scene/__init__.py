"""Scene geometry, transceiver configuration and ground-truth distance queries."""

from thzmap.scene.builder import build_scene, load_scene, scene_from_mapping, scene_hash
from thzmap.scene.errors import SceneError
from thzmap.scene.geometry import (
    azimuth,
    distances_to_walls,
    nearest_surface_distance,
    nearest_surface_distances,
    nearest_wall_indices,
    wrap_to_pi,
    wrap_to_two_pi,
)
from thzmap.scene.models import (
    CornerFeature,
    FrequencyGrid,
    Point2,
    Scene,
    TrxConfig,
    WallSegment,
)

__all__ = [
    "CornerFeature",
    "FrequencyGrid",
    "Point2",
    "Scene",
    "SceneError",
    "TrxConfig",
    "WallSegment",
    "azimuth",
    "build_scene",
    "distances_to_walls",
    "load_scene",
    "nearest_surface_distance",
    "nearest_surface_distances",
    "nearest_wall_indices",
    "scene_from_mapping",
    "scene_hash",
    "wrap_to_pi",
    "wrap_to_two_pi",
]
