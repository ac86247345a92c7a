"""Free-space link budget terms."""

from __future__ import annotations

import math

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from thzmap.channel.errors import ChannelError


def free_space_path_loss_db(distance_m: float | np.ndarray, frequency_hz: float) -> float | np.ndarray:
    """FSPL = 20·log10(4π·d·f/c) over the given (one-way) distance."""
    distance = np.asarray(distance_m, dtype=float)
    if np.any(distance <= 0.0) or frequency_hz <= 0.0:
        raise ChannelError("path loss needs positive distance and frequency")
    loss = 20.0 * np.log10(4.0 * math.pi * distance * frequency_hz / SPEED_OF_LIGHT)
    return float(loss) if loss.ndim == 0 else loss


def echo_amplitude_db(
    gain_dbi: float,
    delay_s: float | np.ndarray,
    frequency_hz: float,
    reflection_loss_db: float | np.ndarray = 0.0,
    extra_loss_db: float | np.ndarray = 0.0,
) -> float | np.ndarray:
    """20·log10|α| for an echo with round-trip delay ``delay_s``.

    The round trip is treated as a single free-space path of length c·τ,
    with the antenna gain counted once per direction.
    """
    path_length = SPEED_OF_LIGHT * np.asarray(delay_s, dtype=float)
    return (
        2.0 * gain_dbi
        - free_space_path_loss_db(path_length, frequency_hz)
        - np.asarray(reflection_loss_db, dtype=float)
        - np.asarray(extra_loss_db, dtype=float)
    )


def db_to_amplitude(value_db: float | np.ndarray) -> float | np.ndarray:
    return np.power(10.0, np.asarray(value_db, dtype=float) / 20.0)


def amplitude_to_db(amplitude: float | np.ndarray) -> float | np.ndarray:
    magnitude = np.abs(np.asarray(amplitude))
    if np.any(magnitude <= 0.0):
        raise ChannelError("amplitude must be non-zero to express in dB")
    return 20.0 * np.log10(magnitude)
