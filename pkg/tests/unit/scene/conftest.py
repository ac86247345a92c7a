from __future__ import annotations

import pytest

from thzmap.scene import TrxConfig, WallSegment
from tests.unit.scene.support import wall


@pytest.fixture
def trx() -> TrxConfig:
    return TrxConfig()


@pytest.fixture
def room_walls() -> list[WallSegment]:
    return [
        wall("back", (-3.0, 3.0), (3.0, 3.0)),
        wall("left", (-3.0, -1.0), (-3.0, 3.0)),
        wall("right", (3.0, -1.0), (3.0, 3.0)),
    ]
