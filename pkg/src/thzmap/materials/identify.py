"""Reflection-loss extraction from echoes and nearest-value material matching."""

from __future__ import annotations

import math
from typing import Protocol, Sequence

import numpy as np
from pydantic import Field

from thzmap.channel.link_budget import amplitude_to_db, echo_amplitude_db
from thzmap.materials.database import MaterialDb
from thzmap.materials.errors import MaterialError
from thzmap.models.base import DomainModel
from thzmap.scene.models import TrxConfig

DEFAULT_QUERY_FREQUENCY_HZ = 300e9


class Echo(Protocol):
    @property
    def alpha(self) -> complex: ...

    @property
    def tau(self) -> float: ...


class RankedMatch(DomainModel):
    name: str
    delta_db: float = Field(..., ge=0.0)


class MatchResult(DomainModel):
    query_rl_db: float | None
    f_hz: float | None
    ranked: tuple[RankedMatch, ...]
    confidence_margin_db: float | None

    @property
    def best(self) -> RankedMatch:
        return self.ranked[0]


def extract_reflection_loss(est: Echo, trx: TrxConfig, f_c: float) -> float:
    """Invert the echo link budget: RL = 2G - FSPL(c·τ, f_c) - 20·log10|α|."""
    if est.tau <= 0.0:
        raise MaterialError("echo delay must be positive")
    magnitude = abs(est.alpha)
    if magnitude == 0.0 or not math.isfinite(magnitude):
        raise MaterialError("echo amplitude must be finite and non-zero")
    lossless_db = float(echo_amplitude_db(trx.antenna_gain_dbi, est.tau, f_c))
    return lossless_db - float(amplitude_to_db(magnitude))


def identify_material(
    rl_db: float,
    db: MaterialDb,
    f_query: float = DEFAULT_QUERY_FREQUENCY_HZ,
) -> MatchResult:
    if len(db) == 0:
        raise MaterialError("material database is empty")
    scored = [(abs(rl_db - record.rl_at(f_query)), record.name) for record in db.records]
    return _result(scored, query_rl_db=rl_db, f_hz=f_query)


def rank_spectral(
    frequencies: Sequence[float],
    rl_db: Sequence[float],
    db: MaterialDb,
) -> MatchResult:
    """Rank records by RMS dB distance over the query frequencies each record covers."""
    query_f = np.asarray(frequencies, dtype=float)
    query_rl = np.asarray(rl_db, dtype=float)
    if query_f.shape != query_rl.shape or query_f.size == 0:
        raise MaterialError("spectral query needs matching, non-empty frequency and loss arrays")
    scored = []
    for record in db.records:
        shared = [index for index, frequency in enumerate(query_f) if record.covers(frequency)]
        if not shared:
            continue
        reference = np.array([record.rl_at(query_f[index]) for index in shared])
        distance = float(np.sqrt(np.mean((query_rl[shared] - reference) ** 2)))
        scored.append((distance, record.name))
    if not scored:
        raise MaterialError("no material covers the query frequencies")
    return _result(scored, query_rl_db=None, f_hz=None)


def _result(scored: list[tuple[float, str]], query_rl_db: float | None, f_hz: float | None) -> MatchResult:
    scored.sort()
    ranked = tuple(RankedMatch(name=name, delta_db=delta) for delta, name in scored)
    margin = ranked[1].delta_db - ranked[0].delta_db if len(ranked) > 1 else None
    return MatchResult(query_rl_db=query_rl_db, f_hz=f_hz, ranked=ranked, confidence_margin_db=margin)
