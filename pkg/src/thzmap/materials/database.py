"""Reflection-loss material database and its CSV format."""

from __future__ import annotations

import csv
import io
import logging
import math
from enum import Enum
from importlib import resources
from pathlib import Path

import numpy as np
from pydantic import Field, model_validator

from thzmap.materials.errors import DatabaseFormatError, MaterialError
from thzmap.models.base import DomainModel

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("name", "category", "frequency_hz", "rl_db")
SEED_RESOURCE = "reflection_loss_300ghz.csv"
FREQUENCY_MATCH_RTOL = 1e-9


class MaterialCategory(str, Enum):
    METAL = "metal"
    BIOLOGICAL = "biological"
    BUILDING = "building"
    FUNCTIONAL = "functional"


class MaterialRecord(DomainModel):
    name: str = Field(..., min_length=1)
    category: MaterialCategory
    rl_db_at: tuple[tuple[float, float], ...] = Field(..., min_length=1)

    @model_validator(mode="after")
    def validate_samples(self) -> "MaterialRecord":
        frequencies = [frequency for frequency, _ in self.rl_db_at]
        losses = [loss for _, loss in self.rl_db_at]
        if any(not math.isfinite(value) for value in frequencies + losses):
            raise ValueError(f"{self.name}: samples must be finite")
        if any(frequency <= 0.0 for frequency in frequencies):
            raise ValueError(f"{self.name}: frequencies must be positive")
        if any(later <= earlier for earlier, later in zip(frequencies, frequencies[1:])):
            raise ValueError(f"{self.name}: frequencies must be strictly increasing")
        if any(loss < 0.0 for loss in losses):
            raise ValueError(f"{self.name}: reflection loss must be >= 0 dB")
        return self

    def frequencies(self) -> np.ndarray:
        return np.array([frequency for frequency, _ in self.rl_db_at], dtype=float)

    def losses(self) -> np.ndarray:
        return np.array([loss for _, loss in self.rl_db_at], dtype=float)

    def covers(self, frequency_hz: float) -> bool:
        frequencies = self.frequencies()
        low = frequencies[0] * (1.0 - FREQUENCY_MATCH_RTOL)
        high = frequencies[-1] * (1.0 + FREQUENCY_MATCH_RTOL)
        return low <= frequency_hz <= high

    def rl_at(self, frequency_hz: float) -> float:
        """Linearly interpolated loss; only inside the sampled range."""
        if not self.covers(frequency_hz):
            raise MaterialError(f"{self.name} has no reflection loss at {frequency_hz:.6g} Hz")
        return self.rl_nearest(frequency_hz)

    def rl_nearest(self, frequency_hz: float) -> float:
        """Interpolated loss, held constant outside the sampled range."""
        return float(np.interp(frequency_hz, self.frequencies(), self.losses()))


class MaterialDb(DomainModel):
    records: tuple[MaterialRecord, ...] = ()

    @model_validator(mode="after")
    def validate_unique_names(self) -> "MaterialDb":
        names = [record.name for record in self.records]
        if len(names) != len(set(names)):
            raise ValueError("material names must be unique")
        return self

    def __len__(self) -> int:
        return len(self.records)

    def names(self) -> tuple[str, ...]:
        return tuple(record.name for record in self.records)

    def get(self, name: str) -> MaterialRecord:
        for record in self.records:
            if record.name == name:
                return record
        raise MaterialError(f"unknown material: {name}")

    def merged(self, other: "MaterialDb") -> "MaterialDb":
        """Records of ``other`` replace same-named records; new names are appended."""
        incoming = {record.name: record for record in other.records}
        kept = [incoming.pop(record.name, record) for record in self.records]
        kept.extend(record for record in other.records if record.name in incoming)
        return MaterialDb(records=tuple(kept))


def db_load(path: str | Path) -> MaterialDb:
    db_path = Path(path)
    if not db_path.exists():
        raise MaterialError(f"material database not found: {db_path}")
    db = parse_database(db_path.read_text(encoding="utf-8"))
    logger.info("loaded %d materials from %s", len(db), db_path)
    return db


def db_save(db: MaterialDb, path: str | Path) -> Path:
    db_path = Path(path)
    db_path.parent.mkdir(parents=True, exist_ok=True)
    db_path.write_text(format_database(db), encoding="utf-8")
    return db_path


def seed_database() -> MaterialDb:
    """The bundled 300 GHz reference values."""
    text = resources.files("thzmap.materials").joinpath("data", SEED_RESOURCE).read_text(encoding="utf-8")
    return parse_database(text)


def format_database(db: MaterialDb) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for record in db.records:
        for frequency, loss in record.rl_db_at:
            writer.writerow((record.name, record.category.value, repr(float(frequency)), repr(float(loss))))
    return buffer.getvalue()


def parse_database(text: str) -> MaterialDb:
    rows = csv.reader(io.StringIO(text))
    header = next(rows, None)
    if header is None or not any(cell.strip() for cell in header):
        return MaterialDb()
    if tuple(cell.strip() for cell in header) != CSV_COLUMNS:
        raise DatabaseFormatError(f"expected header {','.join(CSV_COLUMNS)}", line_number=1)

    categories: dict[str, MaterialCategory] = {}
    samples: dict[str, list[tuple[float, float]]] = {}
    for line_number, row in enumerate(rows, start=2):
        if not row or not any(cell.strip() for cell in row):
            continue
        if len(row) != len(CSV_COLUMNS):
            raise DatabaseFormatError(f"expected {len(CSV_COLUMNS)} fields, got {len(row)}", line_number)
        name, category_raw, frequency_raw, loss_raw = (cell.strip() for cell in row)
        if not name:
            raise DatabaseFormatError("empty material name", line_number)
        try:
            category = MaterialCategory(category_raw)
        except ValueError as exc:
            raise DatabaseFormatError(f"unknown category {category_raw!r}", line_number) from exc
        try:
            frequency = float(frequency_raw)
            loss = float(loss_raw)
        except ValueError as exc:
            raise DatabaseFormatError("frequency_hz and rl_db must be numbers", line_number) from exc
        if not (math.isfinite(frequency) and math.isfinite(loss)) or frequency <= 0.0:
            raise DatabaseFormatError("frequency must be positive and values finite", line_number)
        if loss < 0.0:
            raise DatabaseFormatError("reflection loss must be >= 0 dB", line_number)

        known = categories.setdefault(name, category)
        if known is not category:
            raise DatabaseFormatError(f"{name}: category {category.value} conflicts with {known.value}", line_number)
        previous = samples.setdefault(name, [])
        if previous and frequency == previous[-1][0]:
            raise DatabaseFormatError(f"{name}: duplicate frequency {frequency_raw}", line_number)
        if previous and frequency < previous[-1][0]:
            raise DatabaseFormatError(f"{name}: frequencies must be increasing", line_number)
        previous.append((frequency, loss))

    records = tuple(
        MaterialRecord(name=name, category=categories[name], rl_db_at=tuple(points))
        for name, points in samples.items()
    )
    return MaterialDb(records=records)
