"""Calibration, delay-domain transform and power-angle-delay profiles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.signal import get_window

from thzmap.channel.synthesis import ChannelResponse
from thzmap.estimation.errors import EstimationError

PADP_FLOOR_DB = -200.0
MIN_REFERENCE_MAGNITUDE = 1e-15
NOISE_DECILE = 0.1
# median of the lowest decile of an exponential variable sits at -ln(0.95) of its mean
LOW_DECILE_OFFSET_DB = -10.0 * math.log10(-math.log(0.95))


class Window(str, Enum):
    RECTANGULAR = "rectangular"
    HANN = "hann"


@dataclass(frozen=True)
class Cir:
    g: np.ndarray
    delay_axis: np.ndarray
    scan_angles_deg: np.ndarray
    noise_gain: float

    def __post_init__(self) -> None:
        if self.g.ndim != 2 or self.g.shape != (self.delay_axis.size, self.scan_angles_deg.size):
            raise EstimationError("CIR matrix does not match its axes")

    @property
    def delay_step(self) -> float:
        return float(self.delay_axis[1] - self.delay_axis[0]) if self.delay_axis.size > 1 else 0.0


@dataclass(frozen=True)
class Padp:
    p_db: np.ndarray
    delay_axis: np.ndarray
    scan_angles_deg: np.ndarray
    noise_gain: float

    def __post_init__(self) -> None:
        if self.p_db.ndim != 2 or self.p_db.shape != (self.delay_axis.size, self.scan_angles_deg.size):
            raise EstimationError("PADP matrix does not match its axes")

    def peak(self) -> tuple[int, int]:
        """(delay index, scan index) of the global maximum."""
        flat = int(np.argmax(self.p_db))
        return divmod(flat, self.p_db.shape[1])


def calibrate(h_meas: ChannelResponse, h_ref: ChannelResponse) -> ChannelResponse:
    """Divide out the system response measured in ``h_ref``."""
    if h_meas.grid != h_ref.grid:
        raise EstimationError("calibration grids differ")
    if h_meas.scan_angles_deg.shape != h_ref.scan_angles_deg.shape or not np.allclose(
        h_meas.scan_angles_deg, h_ref.scan_angles_deg
    ):
        raise EstimationError("calibration scan lists differ")
    if np.any(np.abs(h_ref.h) < MIN_REFERENCE_MAGNITUDE):
        raise EstimationError("calibration reference has near-zero entries")
    return ChannelResponse(h=h_meas.h / h_ref.h, grid=h_meas.grid, scan_angles_deg=h_meas.scan_angles_deg)


def window_coefficients(window: Window | str, n: int) -> np.ndarray:
    kind = Window(window)
    if kind is Window.RECTANGULAR:
        return np.ones(n)
    return get_window("hann", n, fftbins=False)


def to_cir(h: ChannelResponse, window: Window | str = Window.RECTANGULAR, oversampling: int = 1) -> Cir:
    """Windowed, zero-padded inverse DFT over frequency for every scan.

    Values are normalised by the window's coherent gain, so an isolated
    on-bin path peaks at its amplitude |α|.
    """
    if oversampling < 1:
        raise EstimationError("oversampling must be >= 1")
    weights = window_coefficients(window, h.n_freq)
    n_pad = h.n_freq * oversampling
    g = np.fft.ifft(h.h * weights[:, None], n=n_pad, axis=0) * (n_pad / weights.sum())
    delay_axis = np.arange(n_pad) / (n_pad * h.grid.step)
    noise_gain = float(np.sum(weights**2) / weights.sum() ** 2)
    return Cir(g=g, delay_axis=delay_axis, scan_angles_deg=h.scan_angles_deg.copy(), noise_gain=noise_gain)


def compute_padp(cir: Cir) -> Padp:
    magnitude = np.abs(cir.g)
    with np.errstate(divide="ignore"):
        p_db = 20.0 * np.log10(magnitude)
    p_db = np.maximum(p_db, PADP_FLOOR_DB)
    return Padp(p_db=p_db, delay_axis=cir.delay_axis, scan_angles_deg=cir.scan_angles_deg, noise_gain=cir.noise_gain)


def estimate_noise_floor(padp: Padp) -> float:
    """Per-sample (frequency-domain) noise power in dB.

    Per scan, the median of the lowest decile of delay bins is lifted to the
    mean of the exponential noise power and rescaled by the window noise gain;
    the per-scan values are averaged in dB.
    """
    if np.all(padp.p_db <= PADP_FLOOR_DB):
        return PADP_FLOOR_DB
    n_low = max(1, math.ceil(NOISE_DECILE * padp.p_db.shape[0]))
    lowest = np.sort(padp.p_db, axis=0)[:n_low]
    per_scan = np.median(lowest, axis=0) + LOW_DECILE_OFFSET_DB - 10.0 * math.log10(padp.noise_gain)
    return float(np.mean(per_scan))


def delay_domain_floor(noise_floor_db: float, noise_gain: float) -> float:
    """Noise power of a single CIR bin for the given per-sample floor."""
    if noise_floor_db <= PADP_FLOOR_DB:
        return PADP_FLOOR_DB
    return noise_floor_db + 10.0 * math.log10(noise_gain)


def peak_noise_floor(noise_floor_db: float, noise_gain: float, n_bins: int) -> float:
    """Expected strongest of ``n_bins`` noise-only CIR bins.

    Bin powers are exponential, so their maximum averages the harmonic
    number H_n (about ln n + γ) times the single-bin mean.
    """
    if n_bins < 1:
        raise EstimationError("peak floor needs at least one bin")
    bin_floor_db = delay_domain_floor(noise_floor_db, noise_gain)
    if bin_floor_db <= PADP_FLOOR_DB:
        return PADP_FLOOR_DB
    harmonic = math.log(n_bins) + float(np.euler_gamma) if n_bins > 1 else 1.0
    return bin_floor_db + 10.0 * math.log10(harmonic)
