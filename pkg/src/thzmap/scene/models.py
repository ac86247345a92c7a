"""Scene geometry and transceiver domain models."""

from __future__ import annotations

import math

import numpy as np
from pydantic import Field, model_validator
from scipy.constants import c as SPEED_OF_LIGHT

from thzmap.models.base import DomainModel

DEFAULT_UCA_RADIUS_M = 0.23
DEFAULT_ANTENNA_GAIN_DBI = 26.0
DEFAULT_HPBW_DEG = 8.0
DEFAULT_TRX_HEIGHT_M = 2.0
DEFAULT_F_START_HZ = 290e9
DEFAULT_F_STOP_HZ = 310e9
DEFAULT_N_POINTS = 2001
DEFAULT_BACKSCATTER_DB = -25.0
SCAN_COUNT_EPS = 1e-9


class Point2(DomainModel):
    x: float = Field(..., allow_inf_nan=False)
    y: float = Field(..., allow_inf_nan=False)

    @classmethod
    def of(cls, values: tuple[float, float] | list[float] | np.ndarray) -> "Point2":
        if len(values) != 2:
            raise ValueError(f"point needs 2 coordinates, got {len(values)}")
        return cls(x=float(values[0]), y=float(values[1]))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    def distance_to(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


class WallSegment(DomainModel):
    id: str = Field(..., min_length=1)
    a: Point2
    b: Point2
    material_name: str = Field(..., min_length=1)
    backscatter_db_per_point: float = Field(default=DEFAULT_BACKSCATTER_DB, allow_inf_nan=False)
    tag: str | None = None

    @model_validator(mode="after")
    def validate_length(self) -> "WallSegment":
        if self.length <= 0.0:
            raise ValueError(f"wall {self.id} is degenerate")
        return self

    @property
    def length(self) -> float:
        return self.a.distance_to(self.b)

    def direction(self) -> np.ndarray:
        return (self.b.as_array() - self.a.as_array()) / self.length

    def normal(self) -> np.ndarray:
        dx, dy = self.direction()
        return np.array([-dy, dx])

    def foot_parameter(self, point: Point2) -> float:
        """Unclamped position of the perpendicular foot along a→b, in meters."""
        return float(np.dot(point.as_array() - self.a.as_array(), self.direction()))


class CornerFeature(DomainModel):
    apex: Point2
    wall_ids: tuple[str, str]
    direct_distance_d: float = Field(..., gt=0.0)


class TrxConfig(DomainModel):
    position: Point2 = Field(default_factory=lambda: Point2(x=0.0, y=0.0))
    uca_radius: float = Field(default=DEFAULT_UCA_RADIUS_M, gt=0.0)
    antenna_gain_dbi: float = DEFAULT_ANTENNA_GAIN_DBI
    hpbw_deg: float = Field(default=DEFAULT_HPBW_DEG, gt=0.0)
    scan_start_deg: float = 0.0
    scan_step_deg: float = Field(default=1.0, gt=0.0)
    scan_stop_deg: float = 180.0
    height_m: float = DEFAULT_TRX_HEIGHT_M

    @model_validator(mode="after")
    def validate_scan(self) -> "TrxConfig":
        if self.scan_stop_deg < self.scan_start_deg:
            raise ValueError("scan_stop_deg must be >= scan_start_deg")
        return self

    @property
    def n_scan(self) -> int:
        span = (self.scan_stop_deg - self.scan_start_deg) / self.scan_step_deg
        return int(math.floor(span + SCAN_COUNT_EPS)) + 1

    def scan_angles_deg(self) -> np.ndarray:
        return self.scan_start_deg + self.scan_step_deg * np.arange(self.n_scan, dtype=float)

    def scan_angles_rad(self) -> np.ndarray:
        return np.deg2rad(self.scan_angles_deg())


class FrequencyGrid(DomainModel):
    f_start: float = Field(default=DEFAULT_F_START_HZ, gt=0.0)
    f_stop: float = Field(default=DEFAULT_F_STOP_HZ, gt=0.0)
    n_points: int = Field(default=DEFAULT_N_POINTS, ge=2)

    @model_validator(mode="after")
    def validate_band(self) -> "FrequencyGrid":
        if self.f_stop <= self.f_start:
            raise ValueError("f_stop must be greater than f_start")
        return self

    @property
    def bandwidth(self) -> float:
        return self.f_stop - self.f_start

    @property
    def step(self) -> float:
        return self.bandwidth / (self.n_points - 1)

    @property
    def center(self) -> float:
        return 0.5 * (self.f_start + self.f_stop)

    @property
    def delay_resolution(self) -> float:
        return 1.0 / self.bandwidth

    @property
    def distance_resolution(self) -> float:
        # conventional c/B value, recorded as metadata only
        return SPEED_OF_LIGHT / self.bandwidth

    @property
    def delay_bin(self) -> float:
        """Spacing of the inverse-DFT delay axis, 1/(N·Δf)."""
        return 1.0 / (self.n_points * self.step)

    @property
    def unambiguous_delay(self) -> float:
        return 1.0 / self.step

    def frequencies(self) -> np.ndarray:
        return np.linspace(self.f_start, self.f_stop, self.n_points)


class Scene(DomainModel):
    walls: tuple[WallSegment, ...]
    corners: tuple[CornerFeature, ...] = ()
    trx: TrxConfig = Field(default_factory=TrxConfig)
    grid: FrequencyGrid = Field(default_factory=FrequencyGrid)

    @model_validator(mode="after")
    def validate_wall_ids(self) -> "Scene":
        ids = [wall.id for wall in self.walls]
        if len(ids) != len(set(ids)):
            raise ValueError("wall ids must be unique")
        known = set(ids)
        for corner in self.corners:
            for wall_id in corner.wall_ids:
                if wall_id not in known:
                    raise ValueError(f"corner references unknown wall: {wall_id}")
        return self

    def wall(self, wall_id: str) -> WallSegment:
        for wall in self.walls:
            if wall.id == wall_id:
                return wall
        raise LookupError(f"wall not found: {wall_id}")

    def tagged_walls(self) -> tuple[WallSegment, ...]:
        return tuple(wall for wall in self.walls if wall.tag is not None)
