"""Frequency-domain channel synthesis for the rotating monostatic TRx."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from pydantic import Field
from scipy.constants import c as SPEED_OF_LIGHT

from thzmap.channel.antenna import AntennaPattern, GaussianPattern, normalized_gain
from thzmap.channel.errors import ChannelError
from thzmap.channel.paths import GroundTruthPath
from thzmap.core.seed import SeedManager
from thzmap.models.base import DomainModel
from thzmap.scene.models import FrequencyGrid, TrxConfig

logger = logging.getLogger(__name__)

MAX_MATRIX_ENTRIES = 100_000_000
NOISE_STREAM = "noise"


@dataclass(frozen=True)
class ChannelResponse:
    h: np.ndarray
    grid: FrequencyGrid
    scan_angles_deg: np.ndarray

    def __post_init__(self) -> None:
        h = np.asarray(self.h)
        angles = np.asarray(self.scan_angles_deg, dtype=float)
        if h.ndim != 2:
            raise ChannelError("response matrix must be 2-D (n_freq x n_scan)")
        if h.shape != (self.grid.n_points, angles.size):
            raise ChannelError(
                f"response shape {h.shape} does not match grid ({self.grid.n_points}) and scans ({angles.size})"
            )
        if not np.all(np.isfinite(h)):
            raise ChannelError("response contains non-finite entries")
        object.__setattr__(self, "h", h.astype(np.complex128, copy=False))
        object.__setattr__(self, "scan_angles_deg", angles)

    @property
    def n_freq(self) -> int:
        return self.h.shape[0]

    @property
    def n_scan(self) -> int:
        return self.h.shape[1]

    @property
    def scan_angles_rad(self) -> np.ndarray:
        return np.deg2rad(self.scan_angles_deg)

    def frequencies(self) -> np.ndarray:
        return self.grid.frequencies()


class SimNoiseConfig(DomainModel):
    """Complex white Gaussian noise; the floor is the mean per-sample power |W|^2 in dB.

    ``noise_floor_dbm_per_point = None`` synthesizes a noiseless response.
    """

    noise_floor_dbm_per_point: float | None = Field(default=None, allow_inf_nan=False)
    seed: int = Field(default=0, ge=0)


def path_signature(
    tau: float,
    theta: float,
    frequencies: np.ndarray,
    scan_angles_rad: np.ndarray,
    uca_radius: float,
    pattern: AntennaPattern,
) -> np.ndarray:
    """Unit-amplitude response of one path over (frequency, scan)."""
    delta = theta - np.asarray(scan_angles_rad, dtype=float)
    gains = normalized_gain(pattern, delta)
    effective_delay = tau - 2.0 * uca_radius * np.cos(delta) / SPEED_OF_LIGHT
    phase = -2.0 * math.pi * np.outer(frequencies, effective_delay)
    return np.exp(1j * phase) * gains[None, :]


def synthesize_response(
    paths: Sequence[GroundTruthPath],
    grid: FrequencyGrid,
    trx: TrxConfig,
    noise: SimNoiseConfig | None = None,
    pattern: AntennaPattern | None = None,
) -> ChannelResponse:
    if not paths:
        raise ChannelError("cannot synthesize a response without paths")
    n_entries = grid.n_points * trx.n_scan
    if n_entries > MAX_MATRIX_ENTRIES:
        raise ChannelError(f"response matrix too large: {n_entries} entries")
    beam = pattern or GaussianPattern(trx)
    frequencies = grid.frequencies()
    scans = trx.scan_angles_rad()

    h = np.zeros((grid.n_points, trx.n_scan), dtype=np.complex128)
    for path in paths:
        h += path.alpha * path_signature(path.tau, path.theta, frequencies, scans, trx.uca_radius, beam)

    if noise is not None and noise.noise_floor_dbm_per_point is not None:
        h += _complex_noise(h.shape, noise)
    logger.info("synthesized %d x %d response from %d paths", h.shape[0], h.shape[1], len(paths))
    return ChannelResponse(h=h, grid=grid, scan_angles_deg=trx.scan_angles_deg())


def noise_for_snr(paths: Sequence[GroundTruthPath], snr_db: float, seed: int) -> SimNoiseConfig:
    """Noise floor set ``snr_db`` below the strongest path's per-sample power."""
    if not paths:
        raise ChannelError("noise_for_snr needs at least one path")
    strongest_db = max(path.power_db for path in paths)
    return SimNoiseConfig(noise_floor_dbm_per_point=strongest_db - snr_db, seed=seed)


def _complex_noise(shape: tuple[int, int], noise: SimNoiseConfig) -> np.ndarray:
    variance = 10.0 ** (noise.noise_floor_dbm_per_point / 10.0)
    # one stream indexed by (freq, scan, re/im), independent of evaluation order
    draws = SeedManager(noise.seed).rng(NOISE_STREAM).standard_normal((*shape, 2))
    return math.sqrt(variance / 2.0) * (draws[..., 0] + 1j * draws[..., 1])
