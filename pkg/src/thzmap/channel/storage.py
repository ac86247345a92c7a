"""Binary channel response files with a JSON sidecar."""

from __future__ import annotations

import json
import logging
import struct
from pathlib import Path
from typing import Any, Mapping

import numpy as np
from pydantic import ValidationError

from thzmap.channel.errors import ChannelError
from thzmap.channel.synthesis import ChannelResponse
from thzmap.scene.models import FrequencyGrid

logger = logging.getLogger(__name__)

HEADER = struct.Struct("<IIdd")
SAMPLE_DTYPE = np.dtype("<c16")


def sidecar_path(path: str | Path) -> Path:
    binary = Path(path)
    return binary.with_name(binary.name + ".json")


def save_response(
    response: ChannelResponse,
    path: str | Path,
    provenance: Mapping[str, Any] | None = None,
) -> Path:
    """Write header + row-major (re, im) f64 pairs, and the sidecar next to it."""
    binary = Path(path)
    binary.parent.mkdir(parents=True, exist_ok=True)
    grid = response.grid
    header = HEADER.pack(response.n_freq, response.n_scan, grid.f_start, grid.f_stop)
    payload = np.ascontiguousarray(response.h).astype(SAMPLE_DTYPE, copy=False).tobytes(order="C")
    binary.write_bytes(header + payload)

    sidecar = {
        "n_points": grid.n_points,
        "scan_angles_deg": [float(angle) for angle in response.scan_angles_deg],
        "provenance": dict(provenance or {}),
    }
    sidecar_path(binary).write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.info("wrote channel response %s (%d x %d)", binary, response.n_freq, response.n_scan)
    return binary


def load_response(path: str | Path) -> tuple[ChannelResponse, dict[str, Any]]:
    """Read a response file; returns the response and its provenance mapping."""
    binary = Path(path)
    if not binary.exists():
        raise ChannelError(f"response file not found: {binary}")
    raw = binary.read_bytes()
    if len(raw) < HEADER.size:
        raise ChannelError(f"response file truncated: {binary}")
    n_freq, n_scan, f_start, f_stop = HEADER.unpack_from(raw)
    expected = HEADER.size + n_freq * n_scan * SAMPLE_DTYPE.itemsize
    if len(raw) != expected:
        raise ChannelError(f"response file size {len(raw)} does not match header (expected {expected})")
    h = np.frombuffer(raw, dtype=SAMPLE_DTYPE, offset=HEADER.size).reshape(n_freq, n_scan).astype(np.complex128)

    meta_path = sidecar_path(binary)
    if not meta_path.exists():
        raise ChannelError(f"response sidecar not found: {meta_path}")
    try:
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ChannelError(f"invalid response sidecar {meta_path}: line {exc.lineno}") from exc
    angles = meta.get("scan_angles_deg")
    if not isinstance(angles, list) or len(angles) != n_scan:
        raise ChannelError("sidecar scan angles do not match the response header")
    try:
        grid = FrequencyGrid(f_start=f_start, f_stop=f_stop, n_points=n_freq)
    except ValidationError as exc:
        raise ChannelError(f"invalid frequency grid in header: {exc.errors()[0]['msg']}") from exc
    response = ChannelResponse(h=h, grid=grid, scan_angles_deg=np.array(angles, dtype=float))
    return response, dict(meta.get("provenance", {}))
