"""Ground-truth multipath enumeration for a scene."""

from __future__ import annotations

import logging
import math
from enum import Enum

import numpy as np
from pydantic import Field, field_validator
from scipy.constants import c as SPEED_OF_LIGHT

from thzmap.channel.errors import ChannelError
from thzmap.channel.link_budget import amplitude_to_db, db_to_amplitude, echo_amplitude_db
from thzmap.materials.database import MaterialDb, seed_database
from thzmap.materials.errors import MaterialError
from thzmap.models.base import DomainModel
from thzmap.scene.geometry import azimuth, wrap_to_two_pi
from thzmap.scene.models import Point2, Scene, WallSegment

logger = logging.getLogger(__name__)

DEFAULT_SCATTER_SPACING_M = 0.02
DEFAULT_FALLOFF_EXPONENT = 40.0
CORNER_RELATIVE_DB = 20.0 * math.log10(0.5)
MIN_FALLOFF_COSINE = 1e-3


class PathKind(str, Enum):
    WALL_SCATTER = "wall_scatter"
    CORNER_RETRO = "corner_retro"


class GroundTruthPath(DomainModel):
    alpha: complex
    tau: float = Field(..., gt=0.0)
    theta: float = Field(..., ge=0.0, lt=2.0 * math.pi)
    kind: PathKind
    source_feature: str

    @field_validator("alpha")
    @classmethod
    def validate_alpha(cls, value: complex) -> complex:
        if not (math.isfinite(value.real) and math.isfinite(value.imag)) or value == 0:
            raise ValueError("path amplitude must be finite and non-zero")
        return value

    @property
    def power_db(self) -> float:
        return float(amplitude_to_db(self.alpha))


def enumerate_paths(
    scene: Scene,
    db: MaterialDb | None = None,
    spacing_m: float = DEFAULT_SCATTER_SPACING_M,
    falloff_exponent: float = DEFAULT_FALLOFF_EXPONENT,
) -> list[GroundTruthPath]:
    """Wall scatter points and corner retro-reflections, walls first."""
    if not scene.walls:
        raise ChannelError("scene has no walls")
    if spacing_m <= 0.0:
        raise ChannelError("scatter spacing must be positive")
    materials = db if db is not None else seed_database()
    f_c = scene.grid.center

    paths: list[GroundTruthPath] = []
    specular_db: dict[str, float | None] = {}
    for wall in scene.walls:
        rl_db = _reflection_loss(materials, wall, f_c)
        wall_paths, specular = _wall_paths(scene, wall, rl_db, spacing_m, falloff_exponent)
        paths.extend(wall_paths)
        specular_db[wall.id] = specular

    n_wall = len(paths)
    for corner in scene.corners:
        strongest = [specular_db[wall_id] for wall_id in corner.wall_ids if specular_db[wall_id] is not None]
        if strongest:
            amplitude_db = max(strongest)
        else:
            amplitude_db = max(
                _nearest_point_db(scene, scene.wall(wall_id), materials, f_c) for wall_id in corner.wall_ids
            )
        tau = 2.0 * (corner.direct_distance_d - scene.trx.uca_radius) / SPEED_OF_LIGHT
        paths.append(
            GroundTruthPath(
                alpha=complex(db_to_amplitude(amplitude_db + CORNER_RELATIVE_DB)),
                tau=tau,
                theta=azimuth(scene.trx.position, corner.apex),
                kind=PathKind.CORNER_RETRO,
                source_feature="+".join(corner.wall_ids),
            )
        )
    logger.info("enumerated %d wall_scatter and %d corner_retro paths", n_wall, len(paths) - n_wall)
    return paths


def scatter_points(wall: WallSegment, spacing_m: float) -> np.ndarray:
    """Evenly spaced points along the wall, both endpoints included."""
    n_segments = max(1, int(round(wall.length / spacing_m)))
    offsets = np.linspace(0.0, wall.length, n_segments + 1)
    return wall.a.as_array()[None, :] + offsets[:, None] * wall.direction()[None, :]


def _reflection_loss(db: MaterialDb, wall: WallSegment, f_c: float) -> float:
    try:
        return db.get(wall.material_name).rl_nearest(f_c)
    except MaterialError as exc:
        raise ChannelError(f"wall {wall.id}: {exc}") from exc


def _wall_paths(
    scene: Scene,
    wall: WallSegment,
    rl_db: float,
    spacing_m: float,
    falloff_exponent: float,
) -> tuple[list[GroundTruthPath], float | None]:
    trx = scene.trx
    origin = trx.position.as_array()
    points = scatter_points(wall, spacing_m)
    rays = points - origin[None, :]
    ranges = np.linalg.norm(rays, axis=1)
    taus = 2.0 * (ranges - trx.uca_radius) / SPEED_OF_LIGHT
    thetas = wrap_to_two_pi(np.arctan2(rays[:, 1], rays[:, 0]))

    cosines = np.abs(rays @ wall.normal()) / ranges
    falloff_db = -20.0 * falloff_exponent * np.log10(np.maximum(cosines, MIN_FALLOFF_COSINE))
    base_db = echo_amplitude_db(trx.antenna_gain_dbi, taus, scene.grid.center, rl_db)
    amplitude_db = base_db - falloff_db + wall.backscatter_db_per_point

    foot = wall.foot_parameter(trx.position)
    specular: float | None = None
    if -0.5 * spacing_m <= foot <= wall.length + 0.5 * spacing_m:
        offsets = np.linalg.norm(points - wall.a.as_array()[None, :], axis=1)
        index = int(np.argmin(np.abs(offsets - foot)))
        amplitude_db[index] = base_db[index]
        specular = float(base_db[index])

    paths = [
        GroundTruthPath(
            alpha=complex(db_to_amplitude(value_db)),
            tau=float(tau),
            theta=float(theta) % (2.0 * math.pi),
            kind=PathKind.WALL_SCATTER,
            source_feature=wall.id,
        )
        for value_db, tau, theta in zip(amplitude_db, taus, thetas)
    ]
    return paths, specular


def _nearest_point_db(scene: Scene, wall: WallSegment, db: MaterialDb, f_c: float) -> float:
    trx = scene.trx
    foot = min(max(wall.foot_parameter(trx.position), 0.0), wall.length)
    nearest = Point2.of(wall.a.as_array() + foot * wall.direction())
    tau = 2.0 * (nearest.distance_to(trx.position) - trx.uca_radius) / SPEED_OF_LIGHT
    return float(echo_amplitude_db(trx.antenna_gain_dbi, tau, f_c, _reflection_loss(db, wall, f_c)))
