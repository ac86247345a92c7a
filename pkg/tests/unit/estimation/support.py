from __future__ import annotations

import numpy as np

from thzmap.channel import ChannelResponse, GroundTruthPath, PathKind
from thzmap.scene import FrequencyGrid, Point2, Scene, TrxConfig, WallSegment, build_scene


def grid(n_points: int = 401) -> FrequencyGrid:
    return FrequencyGrid(f_start=290e9, f_stop=310e9, n_points=n_points)


def path(alpha: complex, tau: float, theta_deg: float) -> GroundTruthPath:
    return GroundTruthPath(
        alpha=alpha, tau=tau, theta=float(np.radians(theta_deg)), kind=PathKind.WALL_SCATTER, source_feature="w"
    )


def single_scan(h: np.ndarray, frequency_grid: FrequencyGrid) -> ChannelResponse:
    return ChannelResponse(h=h.reshape(-1, 1), grid=frequency_grid, scan_angles_deg=np.zeros(1))


def corner_scene() -> Scene:
    walls = [
        WallSegment(id="upper", a=Point2(x=3.0, y=0.0), b=Point2(x=1.5, y=1.5), material_name="Cement"),
        WallSegment(id="lower", a=Point2(x=3.0, y=0.0), b=Point2(x=1.5, y=-1.5), material_name="Cement"),
    ]
    return build_scene(walls, TrxConfig(scan_start_deg=-60.0, scan_stop_deg=60.0), grid(801))
