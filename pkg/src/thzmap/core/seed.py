"""Named random streams derived from one run seed."""

from __future__ import annotations

import hashlib

import numpy as np

STREAM_KEY_BYTES = 8


class SeedManager:
    """Each label gets its own numpy stream; adding a label never shifts another."""

    def __init__(self, global_seed: int) -> None:
        if global_seed < 0:
            raise ValueError("global_seed must be >= 0")
        self._global_seed = global_seed

    def fork(self, label: str) -> int:
        if not label:
            raise ValueError("label must not be empty")
        digest = hashlib.sha256(f"{self._global_seed}:{label}".encode("utf-8")).digest()
        return int.from_bytes(digest[:STREAM_KEY_BYTES], byteorder="big", signed=False)

    def rng(self, label: str) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=self.fork(label))))
