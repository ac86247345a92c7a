"""CSV exports of estimates and profiles."""

from __future__ import annotations

import csv
import logging
from pathlib import Path
from typing import Sequence

from thzmap.estimation.errors import EstimationError
from thzmap.estimation.preprocess import Padp
from thzmap.estimation.sage import MpcEstimate

logger = logging.getLogger(__name__)

ESTIMATE_COLUMNS = ("alpha_re", "alpha_im", "tau_s", "theta_rad", "power_db")


def save_estimates_csv(estimates: Sequence[MpcEstimate], path: str | Path) -> Path:
    """Write estimates sorted by power, strongest first."""
    csv_path = Path(path)
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    ordered = sorted(estimates, key=lambda estimate: estimate.power_db, reverse=True)
    with csv_path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(ESTIMATE_COLUMNS)
        for estimate in ordered:
            writer.writerow(
                (
                    repr(estimate.alpha.real),
                    repr(estimate.alpha.imag),
                    repr(estimate.tau),
                    repr(estimate.theta),
                    repr(estimate.power_db),
                )
            )
    logger.info("wrote %d estimates to %s", len(ordered), csv_path)
    return csv_path


def load_estimates_csv(path: str | Path) -> list[MpcEstimate]:
    csv_path = Path(path)
    if not csv_path.exists():
        raise EstimationError(f"estimates file not found: {csv_path}")
    estimates = []
    with csv_path.open("r", encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or tuple(reader.fieldnames) != ESTIMATE_COLUMNS:
            raise EstimationError(f"{csv_path}: expected header {','.join(ESTIMATE_COLUMNS)}")
        for line_number, row in enumerate(reader, start=2):
            try:
                alpha = complex(float(row["alpha_re"]), float(row["alpha_im"]))
                estimates.append(
                    MpcEstimate(
                        alpha=alpha,
                        tau=float(row["tau_s"]),
                        theta=float(row["theta_rad"]),
                        power_db=float(row["power_db"]),
                    )
                )
            except (TypeError, ValueError) as exc:
                raise EstimationError(f"{csv_path}: invalid estimate at line {line_number}") from exc
    return estimates


def save_padp_csv(padp: Padp, path: str | Path) -> Path:
    """Delay axis (ns) as first column, scan angles (deg) as header row."""
    csv_path = Path(path)
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    with csv_path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["delay_ns", *(f"{angle:g}" for angle in padp.scan_angles_deg)])
        for delay, row in zip(padp.delay_axis, padp.p_db):
            writer.writerow([f"{delay * 1e9:.6f}", *(f"{value:.3f}" for value in row)])
    logger.info("wrote PADP %s", csv_path)
    return csv_path
