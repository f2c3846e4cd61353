"""The nine derived daily variables and the up/down label."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import date

import numpy as np

from .errors import DomainError, FormatError, InsufficientDataError
from .market_data import PriceSeries

COLUMNS = (
    "month",
    "day_month",
    "day_week",
    "open_norm",
    "high_norm",
    "low_norm",
    "close_norm",
    "vol_norm",
    "range_norm",
)
CSV_HEADER = ("date",) + COLUMNS + ("label",)
CLOSE = COLUMNS.index("close_norm")
CALENDAR = (0, 1, 2)
# Same-day inputs a contemporaneous model may see: everything except close_norm.
CONTEMPORANEOUS = tuple(i for i in range(len(COLUMNS)) if i != CLOSE)


@dataclass(frozen=True)
class FeatureRow:
    date: date
    month: int
    day_month: int
    day_week: int
    open_norm: float
    high_norm: float
    low_norm: float
    close_norm: float
    vol_norm: float
    range_norm: float

    @property
    def label(self) -> int:
        return binarize_direction(self.close_norm)


@dataclass(frozen=True, eq=False)
class FeatureFrame:
    """Column store of feature rows; ``values`` columns follow ``COLUMNS``."""

    dates: tuple[date, ...]
    values: np.ndarray
    flagged: np.ndarray  # rows whose vol_norm or range_norm was forced to 0

    def __post_init__(self):
        if self.values.shape != (len(self.dates), len(COLUMNS)):
            raise ValueError("values shape does not match dates")

    def __len__(self) -> int:
        return len(self.dates)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FeatureFrame)
            and self.dates == other.dates
            and np.array_equal(self.values, other.values)
        )

    @property
    def close_norm(self) -> np.ndarray:
        return self.values[:, CLOSE]

    @property
    def labels(self) -> np.ndarray:
        return (self.values[:, CLOSE] > 0).astype(np.int64)

    def column(self, name: str) -> np.ndarray:
        return self.values[:, COLUMNS.index(name)]

    def index_of(self, day: date) -> int:
        try:
            return self._index[day]
        except AttributeError:
            object.__setattr__(self, "_index", {d: i for i, d in enumerate(self.dates)})
            return self._index[day]

    def row(self, i: int) -> FeatureRow:
        v = self.values[i]
        return FeatureRow(self.dates[i], int(v[0]), int(v[1]), int(v[2]), *map(float, v[3:]))

    @property
    def rows(self) -> list[FeatureRow]:
        return [self.row(i) for i in range(len(self))]

    def replace_values(self, values: np.ndarray) -> "FeatureFrame":
        return FeatureFrame(self.dates, np.asarray(values, dtype=np.float64), self.flagged.copy())


def calendar_features(day: date) -> tuple[int, int, int]:
    """(month, day_month, day_week) with Monday coded 1 and Friday 5."""
    if day.weekday() >= 5:
        raise DomainError(f"{day.isoformat()} is a weekend day")
    return day.month, day.day, day.weekday() + 1


def pct_change(prev: float, curr: float) -> float:
    if not prev > 0:
        raise DomainError(f"percent change needs a positive base, got {prev}")
    return 100.0 * (curr - prev) / prev


def binarize_direction(close_norm: float) -> int:
    # zero change is not a rise
    return 1 if close_norm > 0 else 0


def derive_features(series: PriceSeries) -> FeatureFrame:
    bars = series.bars
    if len(bars) < 2:
        raise InsufficientDataError(f"need at least 2 bars, got {len(bars)}")
    n = len(bars) - 1
    values = np.empty((n, len(COLUMNS)), dtype=np.float64)
    flagged = np.zeros(n, dtype=bool)
    for i, (prev, cur) in enumerate(zip(bars, bars[1:])):
        values[i, 0:3] = calendar_features(cur.date)
        values[i, 3] = pct_change(prev.open, cur.open)
        values[i, 4] = pct_change(prev.high, cur.high)
        values[i, 5] = pct_change(prev.low, cur.low)
        values[i, 6] = pct_change(prev.close, cur.close)
        for col, base, now in ((7, prev.volume, cur.volume), (8, prev.high - prev.low, cur.high - cur.low)):
            if base > 0:
                values[i, col] = pct_change(base, now)
            else:
                values[i, col] = 0.0
                flagged[i] = True
    return FeatureFrame(tuple(b.date for b in bars[1:]), values, flagged)


def _fmt(x: float) -> str:
    return repr(float(x))


def frame_to_csv(frame: FeatureFrame) -> str:
    out = [",".join(CSV_HEADER)]
    for i, d in enumerate(frame.dates):
        v = frame.values[i]
        cells = [d.isoformat(), str(int(v[0])), str(int(v[1])), str(int(v[2]))]
        cells += [_fmt(x) for x in v[3:]]
        cells.append(str(binarize_direction(v[CLOSE])))
        out.append(",".join(cells))
    return "\n".join(out) + "\n"


def frame_from_csv(text: str) -> FeatureFrame:
    lines = [ln for ln in text.replace("\r\n", "\n").split("\n") if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise FormatError("empty feature file")
    reader = csv.reader(io.StringIO("\n".join(lines)))
    header = tuple(h.strip() for h in next(reader))
    if header[: len(CSV_HEADER) - 1] != CSV_HEADER[:-1]:
        raise FormatError(f"unexpected feature header {header!r}")
    dates, rows = [], []
    for row in reader:
        dates.append(date.fromisoformat(row[0].strip()))
        rows.append([float(c) for c in row[1 : len(COLUMNS) + 1]])
    values = np.array(rows, dtype=np.float64).reshape(len(rows), len(COLUMNS))
    if not np.all(np.isfinite(values)):
        raise FormatError("non-finite value in feature file")
    if any(b <= a for a, b in zip(dates, dates[1:])):
        raise FormatError("feature dates must be strictly increasing")
    return FeatureFrame(tuple(dates), values, np.zeros(len(dates), dtype=bool))

