from __future__ import annotations

from thzmap.scene import Point2, WallSegment


def wall(wall_id: str, a: tuple[float, float], b: tuple[float, float], material: str = "Cement") -> WallSegment:
    return WallSegment(id=wall_id, a=Point2.of(a), b=Point2.of(b), material_name=material)
