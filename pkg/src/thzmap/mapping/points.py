"""Map points from estimated paths."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from pydantic import Field
from scipy.constants import c as SPEED_OF_LIGHT

from thzmap.estimation.sage import MpcEstimate
from thzmap.models.base import DomainModel
from thzmap.scene.models import Point2, TrxConfig


class MapPoint(DomainModel):
    position: Point2
    source: MpcEstimate
    spurious: bool = False
    distance_d_e: float = Field(..., ge=0.0)

    @property
    def azimuth_deg(self) -> float:
        return math.degrees(self.source.theta)


class MapCloud(DomainModel):
    points: tuple[MapPoint, ...] = ()
    trx_position: Point2

    def __len__(self) -> int:
        return len(self.points)

    def positions(self) -> np.ndarray:
        return np.array([point.position.as_array() for point in self.points], dtype=float).reshape(-1, 2)

    def echo_ranges(self) -> np.ndarray:
        return np.array([point.distance_d_e for point in self.points], dtype=float)

    def azimuths_deg(self) -> np.ndarray:
        return np.array([point.azimuth_deg for point in self.points], dtype=float)

    def spurious_mask(self) -> np.ndarray:
        return np.array([point.spurious for point in self.points], dtype=bool)

    def with_flags(self, flags: Sequence[bool]) -> "MapCloud":
        points = tuple(
            point if point.spurious == bool(flag) else point.model_copy(update={"spurious": bool(flag)})
            for point, flag in zip(self.points, flags, strict=True)
        )
        return MapCloud(points=points, trx_position=self.trx_position)


def mpcs_to_points(
    estimates: Sequence[MpcEstimate],
    trx: TrxConfig,
    power_cutoff_db: float | None = None,
) -> MapCloud:
    """Place each estimate at r = r_S + (c·τ/2)·Ω, r_S being the array rim point facing θ."""
    points = []
    for estimate in estimates:
        if power_cutoff_db is not None and estimate.power_db < power_cutoff_db:
            continue
        echo_range = SPEED_OF_LIGHT * estimate.tau / 2.0
        reach = trx.uca_radius + echo_range
        position = Point2(
            x=trx.position.x + reach * math.cos(estimate.theta),
            y=trx.position.y + reach * math.sin(estimate.theta),
        )
        points.append(MapPoint(position=position, source=estimate, distance_d_e=echo_range))
    return MapCloud(points=tuple(points), trx_position=trx.position)
