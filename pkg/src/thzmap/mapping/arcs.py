"""Detection and removal of the iso-range arc left by corner retro-reflections."""

from __future__ import annotations

import logging
import math
from typing import Sequence

import numpy as np
from pydantic import Field, model_validator
from scipy.spatial import cKDTree

from thzmap.mapping.points import MapCloud
from thzmap.models.base import DomainModel
from thzmap.scene.geometry import azimuth
from thzmap.scene.models import CornerFeature, Point2, Scene, TrxConfig

logger = logging.getLogger(__name__)

DEFAULT_MIN_SPAN_DEG = 15.0
DEFAULT_RADIAL_BIN_CM = 1.5
DEFAULT_TOLERANCE_CM = 3.0
DEFAULT_HPBW_DEG = 8.0
DEFAULT_CORNER_HALF_SPAN_DEG = 12.0
MIN_ARC_SUPPORT = 3
CONSENSUS_NEIGHBORS = 3


class ArcModel(DomainModel):
    center: Point2
    radius: float = Field(..., gt=0.0)
    angular_span: tuple[float, float]
    support_count: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def validate_span(self) -> "ArcModel":
        if not all(math.isfinite(angle) for angle in self.angular_span):
            raise ValueError("arc span must be finite")
        return self

    @property
    def width_deg(self) -> float:
        """Counter-clockwise extent from the first to the second span angle."""
        start, end = self.angular_span
        return (end - start) % 360.0

    def contains(self, azimuth_deg: np.ndarray | float, pad_deg: float = 0.0) -> np.ndarray:
        start = self.angular_span[0] - pad_deg
        offset = np.mod(np.asarray(azimuth_deg, dtype=float) - start, 360.0)
        return offset <= self.width_deg + 2.0 * pad_deg


def detect_spurious_arcs(
    cloud: MapCloud,
    min_span_deg: float = DEFAULT_MIN_SPAN_DEG,
    radial_bin_cm: float = DEFAULT_RADIAL_BIN_CM,
    hpbw_deg: float = DEFAULT_HPBW_DEG,
) -> list[ArcModel]:
    """Find iso-range clusters wider than the beam.

    Each radial bin is taken with its two neighbours; clusters that a
    straight line explains better than a circle about the TRx are walls
    seen near their normal and are skipped.
    """
    if len(cloud) == 0:
        return []
    radii = cloud.echo_ranges()
    azimuths = cloud.azimuths_deg()
    positions = cloud.positions()
    bin_size = radial_bin_cm / 100.0
    bins = np.floor(radii / bin_size).astype(int)
    required_span = max(min_span_deg, 2.0 * hpbw_deg)

    qualifying: list[tuple[int, np.ndarray]] = []
    for bin_index in np.unique(bins):
        support = np.flatnonzero(np.abs(bins - bin_index) <= 1)
        if support.size < MIN_ARC_SUPPORT:
            continue
        _, _, span = _azimuth_span(azimuths[support])
        if span < required_span:
            continue
        if _line_residual(positions[support]) < float(np.std(radii[support])):
            continue
        qualifying.append((int(bin_index), support))

    arcs = []
    for group in _consecutive_groups(qualifying):
        _, support = max(group, key=lambda item: item[1].size)
        start, end, _ = _azimuth_span(azimuths[support])
        arcs.append(
            ArcModel(
                center=cloud.trx_position,
                radius=float(np.mean(radii[support])),
                angular_span=(start, end),
                support_count=int(support.size),
            )
        )
    logger.info("detected %d spurious arcs", len(arcs))
    return arcs


def arc_for_corner(
    corner: CornerFeature,
    trx: TrxConfig,
    half_span_deg: float = DEFAULT_CORNER_HALF_SPAN_DEG,
) -> ArcModel:
    """Arc of the corner's retro path: echo range d - R around the apex azimuth."""
    apex_deg = math.degrees(azimuth(trx.position, corner.apex))
    return ArcModel(
        center=trx.position,
        radius=corner.direct_distance_d - trx.uca_radius,
        angular_span=((apex_deg - half_span_deg) % 360.0, (apex_deg + half_span_deg) % 360.0),
    )


def arcs_for_scene(scene: Scene, half_span_deg: float = DEFAULT_CORNER_HALF_SPAN_DEG) -> list[ArcModel]:
    return [arc_for_corner(corner, scene.trx, half_span_deg) for corner in scene.corners]


def remove_spurious(
    cloud: MapCloud,
    arcs: Sequence[ArcModel],
    tolerance_cm: float = DEFAULT_TOLERANCE_CM,
    hpbw_deg: float = DEFAULT_HPBW_DEG,
) -> MapCloud:
    """Flag points on any arc; existing flags are kept and order is preserved."""
    if len(cloud) == 0 or not arcs:
        return cloud
    tolerance = tolerance_cm / 100.0
    radii = cloud.echo_ranges()
    azimuths = cloud.azimuths_deg()
    positions = cloud.positions()
    flagged = cloud.spurious_mask()

    candidates = np.zeros(len(cloud), dtype=bool)
    for arc in arcs:
        on_radius = np.abs(radii - arc.radius) <= tolerance
        candidates |= on_radius & arc.contains(azimuths, pad_deg=hpbw_deg / 2.0)

    retained = ~candidates & ~flagged
    exempt = np.zeros(len(cloud), dtype=bool)
    if np.count_nonzero(retained) > CONSENSUS_NEIGHBORS:
        retained_positions = positions[retained]
        tree = cKDTree(retained_positions)
        neighbor_counts = np.array(
            [len(found) - 1 for found in tree.query_ball_point(retained_positions, r=2.0 * tolerance)]
        )
        confident = retained_positions[neighbor_counts >= CONSENSUS_NEIGHBORS]
        if confident.size:
            distances, _ = cKDTree(confident).query(positions[candidates])
            exempt[np.flatnonzero(candidates)] = distances <= tolerance

    new_flags = candidates & ~exempt
    logger.info("flagged %d of %d points as spurious", int(np.count_nonzero(new_flags & ~flagged)), len(cloud))
    return cloud.with_flags(flagged | new_flags)


def _azimuth_span(azimuths_deg: np.ndarray) -> tuple[float, float, float]:
    """(start, end, width) of the smallest arc covering all azimuths."""
    ordered = np.sort(np.mod(azimuths_deg, 360.0))
    if ordered.size == 1:
        return float(ordered[0]), float(ordered[0]), 0.0
    gaps = np.diff(np.append(ordered, ordered[0] + 360.0))
    widest = int(np.argmax(gaps))
    start = float(ordered[(widest + 1) % ordered.size])
    end = float(ordered[widest])
    return start, end, 360.0 - float(gaps[widest])


def _line_residual(points: np.ndarray) -> float:
    """RMS distance of the points to their total-least-squares line."""
    centered = points - points.mean(axis=0)
    singular = np.linalg.svd(centered, compute_uv=False)
    return float(singular[-1] / math.sqrt(points.shape[0]))


def _consecutive_groups(
    qualifying: Sequence[tuple[int, np.ndarray]],
) -> list[list[tuple[int, np.ndarray]]]:
    groups: list[list[tuple[int, np.ndarray]]] = []
    for item in qualifying:
        if groups and item[0] == groups[-1][-1][0] + 1:
            groups[-1].append(item)
        else:
            groups.append([item])
    return groups
