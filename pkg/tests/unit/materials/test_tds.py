from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from thzmap.materials import (
    MaterialCategory,
    MaterialError,
    TdsTrace,
    load_tds_trace,
    record_from_tds,
    tds_reflection_loss,
    tds_reflection_spectrum,
)
from tests.unit.materials.support import DT, N_SAMPLES, attenuated, reference_pulse, trace


def _linear_loss(frequencies: np.ndarray) -> np.ndarray:
    return 5.0 + 10.0 * frequencies / 1e12


def test_self_ratio_is_zero() -> None:
    reference = trace(reference_pulse(), "mirror")
    for f_query in (150e9, 300e9, 1.2e12):
        assert tds_reflection_loss(reference, reference, f_query) == pytest.approx(0.0, abs=1e-9)


def test_half_amplitude_is_six_db() -> None:
    pulse = reference_pulse()
    reference = trace(pulse, "mirror")
    sample = trace(0.5 * pulse, "sample")
    assert tds_reflection_loss(sample, reference, 300e9) == pytest.approx(6.0206, abs=1e-4)


def test_constructed_loss_spectrum_is_recovered() -> None:
    pulse = reference_pulse()
    frequencies = np.fft.rfftfreq(N_SAMPLES, d=DT)
    sample = trace(attenuated(pulse, _linear_loss(frequencies)), "cement")
    reference = trace(pulse, "mirror")
    for f_query in (200e9, 300e9, 450e9, 1e12):
        assert tds_reflection_loss(sample, reference, f_query) == pytest.approx(_linear_loss(f_query), abs=0.1)
    spectrum_f, spectrum_rl = tds_reflection_spectrum(sample, reference)
    band = (spectrum_f > 0) & (spectrum_f < 2e12)
    np.testing.assert_allclose(spectrum_rl[band], _linear_loss(spectrum_f[band]), atol=0.1)


def test_scaling_both_traces_changes_nothing() -> None:
    pulse = reference_pulse()
    sample = attenuated(pulse, np.full(N_SAMPLES // 2 + 1, 12.0))
    base = tds_reflection_loss(trace(sample, "s"), trace(pulse, "r"), 300e9)
    scaled = tds_reflection_loss(trace(-3.0 * sample, "s"), trace(-3.0 * pulse, "r"), 300e9)
    assert scaled == pytest.approx(base, abs=1e-9)
    assert base == pytest.approx(12.0, abs=1e-6)


def test_vanishing_sample_is_below_dynamic_range() -> None:
    reference = trace(reference_pulse(), "mirror")
    silent = trace(np.zeros(N_SAMPLES), "absorber")
    with pytest.raises(MaterialError, match="dynamic range"):
        tds_reflection_loss(silent, reference, 300e9)
    _, rl_db = tds_reflection_spectrum(silent, reference)
    assert np.isinf(rl_db[1:100]).all()


def test_query_above_nyquist_is_rejected() -> None:
    reference = trace(reference_pulse(), "mirror")
    with pytest.raises(MaterialError, match="Nyquist"):
        tds_reflection_loss(reference, reference, 0.5 / DT)


def test_mismatched_traces_are_rejected() -> None:
    pulse = reference_pulse()
    with pytest.raises(MaterialError, match="identical"):
        tds_reflection_loss(trace(pulse[:256], "short"), trace(pulse, "mirror"), 300e9)


def test_trace_needs_sixteen_samples() -> None:
    with pytest.raises(ValueError):
        TdsTrace(e_field=(0.0,) * 15, dt=DT, label="short")
    with pytest.raises(ValueError):
        TdsTrace(e_field=(0.0,) * 16, dt=0.0, label="bad")


def test_record_from_tds() -> None:
    pulse = reference_pulse()
    sample = trace(attenuated(pulse, np.full(N_SAMPLES // 2 + 1, 11.84)), "cement")
    record = record_from_tds("Cement (TDS)", "building", sample, trace(pulse, "mirror"), [300e9, 200e9])
    assert record.category is MaterialCategory.BUILDING
    assert [frequency for frequency, _ in record.rl_db_at] == [200e9, 300e9]
    assert record.rl_at(300e9) == pytest.approx(11.84, abs=1e-6)


def test_record_clips_gain_to_zero_loss() -> None:
    pulse = reference_pulse()
    louder = trace(1.1 * pulse, "louder")
    record = record_from_tds("Foil", MaterialCategory.METAL, louder, trace(pulse, "mirror"), [300e9])
    assert record.rl_at(300e9) == 0.0


def test_load_trace_csv(tmp_path: Path) -> None:
    pulse = reference_pulse()
    path = tmp_path / "mirror.csv"
    rows = ["t_s,e_field"] + [f"{index * DT!r},{value!r}" for index, value in enumerate(pulse)]
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    loaded = load_tds_trace(path)
    assert loaded.label == "mirror"
    assert loaded.dt == pytest.approx(DT)
    np.testing.assert_array_equal(loaded.samples(), pulse)


def test_load_trace_rejects_bad_files(tmp_path: Path) -> None:
    with pytest.raises(MaterialError, match="not found"):
        load_tds_trace(tmp_path / "missing.csv")
    uneven = tmp_path / "uneven.csv"
    times = np.arange(20) * DT
    times[10] += 0.3 * DT
    uneven.write_text("t_s,e_field\n" + "".join(f"{t!r},0.0\n" for t in times), encoding="utf-8")
    with pytest.raises(MaterialError, match="uniform"):
        load_tds_trace(uneven)
    columns = tmp_path / "columns.csv"
    columns.write_text("time,value\n0,0\n", encoding="utf-8")
    with pytest.raises(MaterialError, match="columns"):
        load_tds_trace(columns)
