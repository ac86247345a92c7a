from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from thzmap.channel import ChannelError, enumerate_paths, load_response, save_response, synthesize_response
from thzmap.channel.storage import HEADER, sidecar_path
from tests.unit.channel.support import corner_scene


@pytest.fixture
def response():
    scene = corner_scene()
    return synthesize_response(enumerate_paths(scene), scene.grid, scene.trx)


def test_save_and_load(tmp_path: Path, response) -> None:
    target = save_response(response, tmp_path / "out" / "response.bin", {"seed": 3, "scene_hash": "abc"})
    raw = target.read_bytes()
    assert HEADER.unpack_from(raw) == (response.n_freq, response.n_scan, 290e9, 310e9)
    assert len(raw) == HEADER.size + response.n_freq * response.n_scan * 16

    loaded, provenance = load_response(target)
    assert provenance == {"seed": 3, "scene_hash": "abc"}
    assert loaded.h.tobytes() == response.h.tobytes()
    np.testing.assert_array_equal(loaded.scan_angles_deg, response.scan_angles_deg)
    assert loaded.grid == response.grid


def test_samples_are_row_major_interleaved(tmp_path: Path, response) -> None:
    target = save_response(response, tmp_path / "response.bin")
    values = np.frombuffer(target.read_bytes(), dtype="<f8", offset=HEADER.size)
    assert values[0] == response.h[0, 0].real
    assert values[1] == response.h[0, 0].imag
    assert values[2] == response.h[0, 1].real


def test_sidecar_lists_scan_angles(tmp_path: Path, response) -> None:
    target = save_response(response, tmp_path / "response.bin")
    sidecar = json.loads(sidecar_path(target).read_text(encoding="utf-8"))
    assert sidecar_path(target).name == "response.bin.json"
    assert len(sidecar["scan_angles_deg"]) == response.n_scan
    assert sidecar["provenance"] == {}


def test_load_rejects_damaged_files(tmp_path: Path, response) -> None:
    with pytest.raises(ChannelError, match="not found"):
        load_response(tmp_path / "missing.bin")
    target = save_response(response, tmp_path / "response.bin")
    target.write_bytes(target.read_bytes()[:-8])
    with pytest.raises(ChannelError, match="does not match header"):
        load_response(target)

    other = save_response(response, tmp_path / "other.bin")
    sidecar_path(other).unlink()
    with pytest.raises(ChannelError, match="sidecar not found"):
        load_response(other)
