"""Planar geometry queries against scene walls."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from thzmap.scene.errors import SceneError
from thzmap.scene.models import Point2, Scene, WallSegment

TWO_PI = 2.0 * np.pi


def wrap_to_pi(angle: np.ndarray | float) -> np.ndarray | float:
    """Wrap radians to [-π, π)."""
    return (np.asarray(angle) + np.pi) % TWO_PI - np.pi


def wrap_to_two_pi(angle: np.ndarray | float) -> np.ndarray | float:
    return np.mod(angle, TWO_PI)


def azimuth(origin: Point2, target: Point2) -> float:
    """Azimuth of target seen from origin, in [0, 2π)."""
    return float(wrap_to_two_pi(np.arctan2(target.y - origin.y, target.x - origin.x)))


def wall_endpoints(walls: Sequence[WallSegment]) -> tuple[np.ndarray, np.ndarray]:
    starts = np.array([wall.a.as_array() for wall in walls], dtype=float).reshape(-1, 2)
    ends = np.array([wall.b.as_array() for wall in walls], dtype=float).reshape(-1, 2)
    return starts, ends


def segment_distances(points: np.ndarray, starts: np.ndarray, ends: np.ndarray) -> np.ndarray:
    """Point-to-segment distances, shape (n_points, n_segments)."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    edge = ends - starts
    length_sq = np.sum(edge * edge, axis=1)
    offset = points[:, None, :] - starts[None, :, :]
    t = np.clip(np.sum(offset * edge[None, :, :], axis=2) / length_sq[None, :], 0.0, 1.0)
    closest = starts[None, :, :] + t[:, :, None] * edge[None, :, :]
    return np.linalg.norm(points[:, None, :] - closest, axis=2)


def distances_to_walls(points: np.ndarray, walls: Sequence[WallSegment]) -> np.ndarray:
    if not walls:
        raise SceneError("scene has no walls")
    starts, ends = wall_endpoints(walls)
    return segment_distances(points, starts, ends)


def nearest_surface_distances(points: np.ndarray, scene: Scene) -> np.ndarray:
    return distances_to_walls(points, scene.walls).min(axis=1)


def nearest_surface_distance(p: Point2, scene: Scene) -> float:
    return float(nearest_surface_distances(p.as_array(), scene)[0])


def nearest_wall_indices(points: np.ndarray, scene: Scene) -> np.ndarray:
    return distances_to_walls(points, scene.walls).argmin(axis=1)


def _cross(u: np.ndarray, v: np.ndarray) -> float:
    return float(u[0] * v[1] - u[1] * v[0])


def segment_intersection(
    first: WallSegment,
    second: WallSegment,
    tolerance: float,
) -> np.ndarray | None:
    """Intersection point of two walls, or None.

    Raises SceneError when the walls are collinear and overlap.
    """
    p, r = first.a.as_array(), first.b.as_array() - first.a.as_array()
    q, s = second.a.as_array(), second.b.as_array() - second.a.as_array()
    denom = _cross(r, s)
    offset = q - p
    if abs(denom) <= 1e-12 * first.length * second.length:
        if abs(_cross(offset, r)) > tolerance * first.length:
            return None
        direction = r / first.length
        lo1, hi1 = 0.0, first.length
        lo2, hi2 = sorted((float(np.dot(q - p, direction)), float(np.dot(q + s - p, direction))))
        overlap = min(hi1, hi2) - max(lo1, lo2)
        if overlap > tolerance:
            raise SceneError(f"walls {first.id} and {second.id} overlap")
        return None
    t = _cross(offset, s) / denom
    u = _cross(offset, r) / denom
    t_tol = tolerance / first.length
    u_tol = tolerance / second.length
    if -t_tol <= t <= 1.0 + t_tol and -u_tol <= u <= 1.0 + u_tol:
        return p + min(max(t, 0.0), 1.0) * r
    return None
