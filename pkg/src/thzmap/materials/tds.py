"""Mirror-referenced reflection loss from time-domain pulse traces."""

from __future__ import annotations

import csv
import logging
from pathlib import Path
from typing import Sequence

import numpy as np
from pydantic import Field

from thzmap.materials.database import MaterialCategory, MaterialRecord
from thzmap.materials.errors import MaterialError
from thzmap.models.base import DomainModel

logger = logging.getLogger(__name__)

MIN_TRACE_SAMPLES = 16
DYNAMIC_RANGE = 1e-12
UNIFORM_STEP_RTOL = 1e-6


class TdsTrace(DomainModel):
    e_field: tuple[float, ...] = Field(..., min_length=MIN_TRACE_SAMPLES)
    dt: float = Field(..., gt=0.0)
    label: str = Field(..., min_length=1)

    @property
    def nyquist(self) -> float:
        return 0.5 / self.dt

    def samples(self) -> np.ndarray:
        return np.asarray(self.e_field, dtype=float)


def tds_reflection_spectrum(sample: TdsTrace, reference: TdsTrace) -> tuple[np.ndarray, np.ndarray]:
    """Frequencies and RL(f) = 20·log10(|E_ref|/|E_sample|); inf where the sample vanishes."""
    frequencies, sample_mag, reference_mag = _magnitudes(sample, reference)
    with np.errstate(divide="ignore", invalid="ignore"):
        rl_db = 20.0 * np.log10(reference_mag / sample_mag)
    rl_db[sample_mag < DYNAMIC_RANGE * reference_mag] = np.inf
    return frequencies, rl_db


def tds_reflection_loss(sample: TdsTrace, reference: TdsTrace, f_query: float) -> float:
    frequencies, sample_mag, reference_mag = _magnitudes(sample, reference)
    if not 0.0 <= f_query < sample.nyquist:
        raise MaterialError(f"query frequency {f_query:.6g} Hz outside [0, Nyquist={sample.nyquist:.6g})")
    upper = int(np.searchsorted(frequencies, f_query))
    bracket = sorted({max(upper - 1, 0), min(upper, frequencies.size - 1)})
    for index in bracket:
        if reference_mag[index] == 0.0 or sample_mag[index] < DYNAMIC_RANGE * reference_mag[index]:
            raise MaterialError(f"{sample.label}: sample spectrum below dynamic range at {f_query:.6g} Hz")
    rl_db = 20.0 * np.log10(reference_mag[bracket] / sample_mag[bracket])
    return float(np.interp(f_query, frequencies[bracket], rl_db))


def record_from_tds(
    name: str,
    category: MaterialCategory | str,
    sample: TdsTrace,
    reference: TdsTrace,
    frequencies: Sequence[float],
) -> MaterialRecord:
    """Sample the measured spectrum at ``frequencies`` into a database record."""
    points = tuple(
        (float(frequency), max(tds_reflection_loss(sample, reference, frequency), 0.0))
        for frequency in sorted(frequencies)
    )
    return MaterialRecord(name=name, category=MaterialCategory(category), rl_db_at=points)


def load_tds_trace(path: str | Path, label: str | None = None) -> TdsTrace:
    """Read a ``t_s,e_field`` CSV with a uniform time step."""
    trace_path = Path(path)
    if not trace_path.exists():
        raise MaterialError(f"trace file not found: {trace_path}")
    times: list[float] = []
    values: list[float] = []
    with trace_path.open("r", encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or not {"t_s", "e_field"} <= set(reader.fieldnames):
            raise MaterialError(f"{trace_path}: expected t_s,e_field columns")
        for line_number, row in enumerate(reader, start=2):
            try:
                times.append(float(row["t_s"]))
                values.append(float(row["e_field"]))
            except (TypeError, ValueError) as exc:
                raise MaterialError(f"{trace_path}: invalid sample at line {line_number}") from exc
    if len(times) < MIN_TRACE_SAMPLES:
        raise MaterialError(f"{trace_path}: need at least {MIN_TRACE_SAMPLES} samples")
    steps = np.diff(np.asarray(times))
    dt = float(np.mean(steps))
    if dt <= 0.0 or np.max(np.abs(steps - dt)) > UNIFORM_STEP_RTOL * dt:
        raise MaterialError(f"{trace_path}: time axis must be uniform and increasing")
    return TdsTrace(e_field=tuple(values), dt=dt, label=label or trace_path.stem)


def _magnitudes(sample: TdsTrace, reference: TdsTrace) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if len(sample.e_field) != len(reference.e_field) or not np.isclose(sample.dt, reference.dt, rtol=1e-12):
        raise MaterialError("sample and reference traces need identical length and dt")
    n = len(sample.e_field)
    frequencies = np.fft.rfftfreq(n, d=sample.dt)
    sample_mag = np.abs(np.fft.rfft(sample.samples()))
    reference_mag = np.abs(np.fft.rfft(reference.samples()))
    return frequencies, sample_mag, reference_mag
