from __future__ import annotations

import math
from typing import Iterable

from scipy.constants import c as SPEED_OF_LIGHT

from thzmap.estimation import MpcEstimate
from thzmap.mapping import MapCloud, mpcs_to_points
from thzmap.scene import Point2, Scene, TrxConfig, WallSegment, build_scene

TRX = TrxConfig()


def estimate_at(echo_range_m: float, azimuth_deg: float, power_db: float = -60.0) -> MpcEstimate:
    alpha = 10.0 ** (power_db / 20.0)
    return MpcEstimate.of(alpha, 2.0 * echo_range_m / SPEED_OF_LIGHT, math.radians(azimuth_deg))


def estimate_towards(x: float, y: float, trx: TrxConfig = TRX) -> MpcEstimate:
    """Estimate whose map point lands on (x, y)."""
    dx, dy = x - trx.position.x, y - trx.position.y
    return estimate_at(math.hypot(dx, dy) - trx.uca_radius, math.degrees(math.atan2(dy, dx)))


def cloud_of(estimates: Iterable[MpcEstimate], trx: TrxConfig = TRX) -> MapCloud:
    return mpcs_to_points(list(estimates), trx)


def wall_scene(y: float = 3.0, trx: TrxConfig = TRX) -> Scene:
    wall = WallSegment(id="back", a=Point2(x=-2.0, y=y), b=Point2(x=2.0, y=y), material_name="Cement")
    return build_scene([wall], trx)
