"""Ranging error of a map cloud against the scene walls."""

from __future__ import annotations

import math

import numpy as np
from pydantic import Field, model_validator

from thzmap.mapping.errors import MappingError
from thzmap.mapping.points import MapCloud
from thzmap.models.base import DomainModel
from thzmap.scene.geometry import nearest_surface_distances
from thzmap.scene.models import Scene


class RangingReport(DomainModel):
    mde_cm: float = Field(..., ge=0.0)
    rmse_cm: float = Field(..., ge=0.0)
    n_points: int = Field(..., ge=0)
    n_removed: int = Field(..., ge=0)

    @model_validator(mode="after")
    def validate_order(self) -> "RangingReport":
        if not (math.isfinite(self.mde_cm) and math.isfinite(self.rmse_cm)):
            raise ValueError("ranging errors must be finite")
        if self.rmse_cm < self.mde_cm * (1.0 - 1e-12):
            raise ValueError("rmse_cm must be >= mde_cm")
        return self


def ranging_error(cloud: MapCloud, scene: Scene, include_spurious: bool = False) -> RangingReport:
    """Mean and RMS nearest-surface distance in cm over the scored points."""
    flagged = cloud.spurious_mask()
    scored = np.ones(len(cloud), dtype=bool) if include_spurious else ~flagged
    if not np.any(scored):
        raise MappingError("no map points left to score")
    distances_cm = 100.0 * nearest_surface_distances(cloud.positions()[scored], scene)
    mde = float(np.mean(distances_cm))
    rmse = float(np.sqrt(np.mean(distances_cm**2)))
    return RangingReport(
        mde_cm=mde,
        rmse_cm=max(rmse, mde),
        n_points=int(np.count_nonzero(scored)),
        n_removed=int(np.count_nonzero(flagged)),
    )
