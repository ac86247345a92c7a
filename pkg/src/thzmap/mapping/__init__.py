"""Map reconstruction from estimated paths, spurious-arc handling and scoring."""

from thzmap.mapping.arcs import (
    ArcModel,
    arc_for_corner,
    arcs_for_scene,
    detect_spurious_arcs,
    remove_spurious,
)
from thzmap.mapping.errors import MappingError
from thzmap.mapping.points import MapCloud, MapPoint, mpcs_to_points
from thzmap.mapping.render import render_cloud_svg, save_cloud_csv
from thzmap.mapping.scoring import RangingReport, ranging_error

__all__ = [
    "ArcModel",
    "MapCloud",
    "MapPoint",
    "MappingError",
    "RangingReport",
    "arc_for_corner",
    "arcs_for_scene",
    "detect_spurious_arcs",
    "mpcs_to_points",
    "ranging_error",
    "remove_spurious",
    "render_cloud_svg",
    "save_cloud_csv",
]
