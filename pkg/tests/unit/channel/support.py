from __future__ import annotations

from thzmap.scene import FrequencyGrid, Point2, Scene, TrxConfig, WallSegment, build_scene


def wall(wall_id: str, a: tuple[float, float], b: tuple[float, float], material: str = "Cement") -> WallSegment:
    return WallSegment(id=wall_id, a=Point2.of(a), b=Point2.of(b), material_name=material)


def small_grid(n_points: int = 201) -> FrequencyGrid:
    return FrequencyGrid(f_start=290e9, f_stop=310e9, n_points=n_points)


def corner_scene(grid: FrequencyGrid | None = None, trx: TrxConfig | None = None) -> Scene:
    """Two perpendicular walls meeting 3 m in front of the TRx at boresight 0°."""
    walls = [wall("upper", (3.0, 0.0), (1.5, 1.5)), wall("lower", (3.0, 0.0), (1.5, -1.5))]
    return build_scene(walls, trx or TrxConfig(scan_start_deg=-60.0, scan_stop_deg=60.0), grid or small_grid())
