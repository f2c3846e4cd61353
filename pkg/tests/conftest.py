from datetime import date
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from stockcast import harness as H
from stockcast.config import bundled
from stockcast.features import derive_features
from stockcast.market_data import read_ohlcv

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

TRAIN_END = date(2017, 12, 29)
TEST_END = date(2019, 6, 28)


@pytest.fixture(scope="session")
def fixture_series():
    return read_ohlcv(bundled("nifty50_2015_2019.csv"))


@pytest.fixture(scope="session")
def fixture_frame(fixture_series):
    return derive_features(fixture_series)


@pytest.fixture(scope="session")
def plans(fixture_frame):
    return H.make_case_splits(fixture_frame, TRAIN_END, TEST_END)


@pytest.fixture
def data_dir():
    return Path(bundled(""))


def trading_days(start, n):
    from datetime import timedelta

    out, d = [], start
    while len(out) < n:
        if d.weekday() < 5:
            out.append(d)
        d += timedelta(days=1)
    return out


def synthetic_frame(n, seed=0, close=None):
    """A FeatureFrame with calendar columns from real weekdays and random norms."""
    import numpy as np

    from stockcast import features as F
    from stockcast.rng import SplitMix64

    days = trading_days(date(2016, 1, 4), n)
    g = SplitMix64(seed)
    values = np.empty((n, len(F.COLUMNS)))
    for i, d in enumerate(days):
        values[i, :3] = F.calendar_features(d)
    values[:, 3:] = g.normal((n, 6))
    if close is not None:
        values[:, F.CLOSE] = close
    return F.FeatureFrame(tuple(days), values, np.zeros(n, dtype=bool))


_ACCEPTANCE: dict[int, str] = {}


def record_acceptance(n: int, line: str) -> None:
    _ACCEPTANCE[n] = line


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[n])
