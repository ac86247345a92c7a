"""Reflection-loss database, TDS processing and material identification."""

from thzmap.materials.errors import DatabaseFormatError, MaterialError
from thzmap.materials.database import (
    MaterialCategory,
    MaterialDb,
    MaterialRecord,
    db_load,
    db_save,
    seed_database,
)
from thzmap.materials.tds import (
    TdsTrace,
    load_tds_trace,
    record_from_tds,
    tds_reflection_loss,
    tds_reflection_spectrum,
)
from thzmap.materials.identify import (
    MatchResult,
    RankedMatch,
    extract_reflection_loss,
    identify_material,
    rank_spectral,
)

__all__ = [
    "DatabaseFormatError",
    "MatchResult",
    "MaterialCategory",
    "MaterialDb",
    "MaterialError",
    "MaterialRecord",
    "RankedMatch",
    "TdsTrace",
    "db_load",
    "db_save",
    "extract_reflection_loss",
    "identify_material",
    "load_tds_trace",
    "rank_spectral",
    "record_from_tds",
    "seed_database",
    "tds_reflection_loss",
    "tds_reflection_spectrum",
]
