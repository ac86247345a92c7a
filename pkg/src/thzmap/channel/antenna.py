"""Directional antenna pattern models used by synthesis and estimation."""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Protocol

import numpy as np

from thzmap.channel.errors import ChannelError
from thzmap.scene.geometry import wrap_to_pi
from thzmap.scene.models import TrxConfig

SIDELOBE_FLOOR_DB = -30.0
_SIDELOBE_FLOOR = 10.0 ** (SIDELOBE_FLOOR_DB / 10.0)


class AntennaPattern(Protocol):
    @property
    def peak_gain(self) -> float:
        """Linear power gain at boresight (G0)."""

    @property
    def hpbw_rad(self) -> float: ...

    def gain(self, delta_theta: np.ndarray | float) -> np.ndarray: ...


def antenna_gain(delta_theta: np.ndarray | float, trx: TrxConfig) -> np.ndarray | float:
    """Linear power gain of the Gaussian mainlobe model with a -30 dB floor."""
    gain = GaussianPattern(trx).gain(delta_theta)
    return float(gain) if np.ndim(gain) == 0 else gain


def normalized_gain(pattern: AntennaPattern, delta_theta: np.ndarray | float) -> np.ndarray:
    """Round-trip amplitude factor g = G/G0 applied to each echo."""
    return pattern.gain(delta_theta) / pattern.peak_gain


class GaussianPattern:
    def __init__(self, trx: TrxConfig) -> None:
        self._peak = 10.0 ** (trx.antenna_gain_dbi / 10.0)
        self._hpbw = math.radians(trx.hpbw_deg)

    @property
    def peak_gain(self) -> float:
        return self._peak

    @property
    def hpbw_rad(self) -> float:
        return self._hpbw

    def gain(self, delta_theta: np.ndarray | float) -> np.ndarray:
        delta = wrap_to_pi(np.asarray(delta_theta, dtype=float))
        mainlobe = np.exp(-4.0 * math.log(2.0) * (delta / self._hpbw) ** 2)
        return self._peak * np.maximum(mainlobe, _SIDELOBE_FLOOR)


class TabulatedPattern:
    """Measured pattern sampled in angle, linearly interpolated in dB."""

    def __init__(self, angles_deg: np.ndarray, gains_db: np.ndarray) -> None:
        angles = np.asarray(angles_deg, dtype=float)
        gains = np.asarray(gains_db, dtype=float)
        if angles.ndim != 1 or angles.shape != gains.shape or angles.size < 3:
            raise ChannelError("pattern table needs at least 3 matching angle/gain samples")
        if not (np.all(np.isfinite(angles)) and np.all(np.isfinite(gains))):
            raise ChannelError("pattern table contains non-finite values")
        wrapped = np.degrees(wrap_to_pi(np.radians(angles)))
        order = np.argsort(wrapped)
        self._angles = wrapped[order]
        if np.any(np.diff(self._angles) <= 0.0):
            raise ChannelError("pattern table has duplicate angles")
        self._gains_db = gains[order]
        self._peak = float(10.0 ** (self._gains_db.max() / 10.0))
        self._hpbw = self._measure_hpbw()

    @classmethod
    def from_csv(cls, path: str | Path) -> "TabulatedPattern":
        table_path = Path(path)
        if not table_path.exists():
            raise ChannelError(f"pattern file not found: {table_path}")
        angles: list[float] = []
        gains: list[float] = []
        with table_path.open("r", encoding="utf-8", newline="") as handle:
            reader = csv.DictReader(handle)
            if reader.fieldnames is None or not {"angle_deg", "gain_db"} <= set(reader.fieldnames):
                raise ChannelError("pattern csv needs angle_deg,gain_db columns")
            for line_number, row in enumerate(reader, start=2):
                try:
                    angles.append(float(row["angle_deg"]))
                    gains.append(float(row["gain_db"]))
                except (TypeError, ValueError) as exc:
                    raise ChannelError(f"invalid pattern row at line {line_number}") from exc
        return cls(np.array(angles), np.array(gains))

    @property
    def peak_gain(self) -> float:
        return self._peak

    @property
    def hpbw_rad(self) -> float:
        return self._hpbw

    def gain(self, delta_theta: np.ndarray | float) -> np.ndarray:
        delta_deg = np.degrees(wrap_to_pi(np.asarray(delta_theta, dtype=float)))
        gains_db = np.interp(delta_deg, self._angles, self._gains_db, period=360.0)
        return np.power(10.0, gains_db / 10.0)

    def _measure_hpbw(self) -> float:
        fine = np.linspace(-180.0, 180.0, 36001)
        gains_db = np.interp(fine, self._angles, self._gains_db, period=360.0)
        above = fine[gains_db >= self._gains_db.max() - 3.0103]
        return math.radians(float(above.max() - above.min()))
