from __future__ import annotations

from datetime import datetime, timezone

import pytest

from oms.app import Application
from oms.clock import ManualClock
from oms.config import AppConfig
from oms.seed import seed_demo

START = datetime(2026, 1, 5, 9, 0, tzinfo=timezone.utc)  # a Monday, 09:00


def make_app(clock: ManualClock | None = None, **config_overrides) -> Application:
    config = AppConfig(pbkdf2_iterations=1_000, **config_overrides)
    return Application(config, clock=clock or ManualClock(START))


@pytest.fixture
def clock() -> ManualClock:
    return ManualClock(START)


@pytest.fixture
def app(clock) -> Application:
    return make_app(clock)


@pytest.fixture
def world(app):
    return seed_demo(app)


@pytest.fixture
def director(world):
    return world["director"]


@pytest.fixture
def supervisor(world):
    return world["supervisor"]


@pytest.fixture
def customer(world):
    return world["customer"]


@pytest.fixture
def staff(world):
    return world["staff"]
