from __future__ import annotations

import numpy as np

from thzmap.materials import TdsTrace

N_SAMPLES = 512
DT = 50e-15


def reference_pulse() -> np.ndarray:
    t = (np.arange(N_SAMPLES) - 100) * DT
    width = 0.25e-12
    return -t / width * np.exp(-0.5 * (t / width) ** 2)


def trace(values: np.ndarray, label: str) -> TdsTrace:
    return TdsTrace(e_field=tuple(float(value) for value in values), dt=DT, label=label)


def attenuated(values: np.ndarray, rl_db: np.ndarray) -> np.ndarray:
    """Apply a frequency-dependent loss (dB per rfft bin) to a trace."""
    spectrum = np.fft.rfft(values) * 10.0 ** (-rl_db / 20.0)
    return np.fft.irfft(spectrum, n=values.size)
