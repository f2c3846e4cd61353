"""Daily OHLCV ingestion and calendar checks."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from datetime import date, timedelta

from .errors import FormatError, OrderingError, ValidationError

REQUIRED_COLUMNS = ("Date", "Open", "High", "Low", "Close", "Volume")
OPTIONAL_COLUMNS = ("Adj Close",)


@dataclass(frozen=True)
class OhlcvBar:
    date: date
    open: float
    high: float
    low: float
    close: float
    volume: float

    def check(self) -> None:
        """Raise ValidationError if the bar breaks price ordering or sign rules."""
        prices = (self.open, self.high, self.low, self.close)
        if not all(math.isfinite(p) and p > 0 for p in prices):
            raise ValidationError(f"{self.date.isoformat()}: prices must be positive and finite")
        if not (math.isfinite(self.volume) and self.volume >= 0):
            raise ValidationError(f"{self.date.isoformat()}: volume must be non-negative")
        if self.low > min(self.open, self.close) or self.high < max(self.open, self.close):
            raise ValidationError(
                f"{self.date.isoformat()}: low/high do not bracket open and close "
                f"(low={self.low}, high={self.high})"
            )


@dataclass(frozen=True)
class ParseReport:
    rows_read: int
    dropped: int
    dropped_dates: tuple[str, ...] = ()


@dataclass(frozen=True)
class PriceSeries:
    bars: tuple[OhlcvBar, ...]
    report: ParseReport | None = field(default=None, compare=False)

    def __len__(self) -> int:
        return len(self.bars)

    @property
    def dates(self) -> list[date]:
        return [b.date for b in self.bars]


@dataclass(frozen=True)
class GapReport:
    missing: tuple[date, ...]
    duplicates: tuple[date, ...]
    weekend: tuple[date, ...]

    @property
    def gap_count(self) -> int:
        return len(self.missing)

    @property
    def duplicate_count(self) -> int:
        return len(self.duplicates)

    @property
    def weekend_count(self) -> int:
        return len(self.weekend)

    def lines(self) -> list[str]:
        out = [f"gap {d.isoformat()}" for d in self.missing]
        out += [f"duplicate {d.isoformat()}" for d in self.duplicates]
        out += [f"weekend {d.isoformat()}" for d in self.weekend]
        return out


def _parse_number(text: str) -> float | None:
    text = text.strip()
    if not text or text.lower() in ("null", "nan", "na"):
        return None
    value = float(text)
    return value if math.isfinite(value) else None


def parse_ohlcv_csv(text: str) -> PriceSeries:
    """Parse ``Date,Open,High,Low,Close,Volume`` text into a validated series.

    Rows with a blank or non-numeric price/volume field are skipped and counted
    in ``series.report``.  Weekend dates, broken price ordering and
    non-increasing dates raise.
    """
    reader = csv.reader(io.StringIO(text.replace("\r\n", "\n").replace("\r", "\n")))
    rows = [r for r in reader if any(cell.strip() for cell in r)]
    if not rows:
        raise FormatError("empty input: missing header row")
    header = [h.strip() for h in rows[0]]
    unknown = [h for h in header if h not in REQUIRED_COLUMNS + OPTIONAL_COLUMNS]
    missing = [h for h in REQUIRED_COLUMNS if h not in header]
    if missing or unknown or len(set(header)) != len(header):
        raise FormatError(f"malformed header {header!r}; expected {','.join(REQUIRED_COLUMNS)}")
    col = {name: header.index(name) for name in REQUIRED_COLUMNS}

    bars: list[OhlcvBar] = []
    dropped: list[str] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise FormatError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        raw_date = row[col["Date"]].strip()
        try:
            day = date.fromisoformat(raw_date)
        except ValueError:
            raise FormatError(f"line {lineno}: bad date {raw_date!r}") from None
        try:
            values = [_parse_number(row[col[k]]) for k in REQUIRED_COLUMNS[1:]]
        except ValueError:
            values = [None]
        if any(v is None for v in values):
            dropped.append(raw_date)
            continue
        if day.weekday() >= 5:
            raise ValidationError(f"{raw_date}: weekend-dated row")
        bar = OhlcvBar(day, *values)
        bar.check()
        if bars and bar.date <= bars[-1].date:
            raise OrderingError(f"{raw_date}: dates must be strictly increasing (previous {bars[-1].date})")
        bars.append(bar)

    report = ParseReport(rows_read=len(rows) - 1, dropped=len(dropped), dropped_dates=tuple(dropped))
    return PriceSeries(tuple(bars), report)


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() and abs(x) < 1e15 else repr(float(x))


def serialize_ohlcv(series: PriceSeries) -> str:
    lines = [",".join(REQUIRED_COLUMNS)]
    for b in series.bars:
        lines.append(",".join([b.date.isoformat(), _fmt(b.open), _fmt(b.high), _fmt(b.low), _fmt(b.close), _fmt(b.volume)]))
    return "\n".join(lines) + "\n"


def read_ohlcv(path) -> PriceSeries:
    with open(path, encoding="utf-8") as fh:
        return parse_ohlcv_csv(fh.read())


def validate_series(series: PriceSeries) -> GapReport:
    """Report missing weekdays, duplicate dates and weekend rows.  Never mutates."""
    missing: list[date] = []
    duplicates: list[date] = []
    weekend = [b.date for b in series.bars if b.date.weekday() >= 5]
    for prev, cur in zip(series.bars, series.bars[1:]):
        if cur.date == prev.date:
            duplicates.append(cur.date)
            continue
        d = prev.date + timedelta(days=1)
        while d < cur.date:
            if d.weekday() < 5:
                missing.append(d)
            d += timedelta(days=1)
    return GapReport(tuple(missing), tuple(duplicates), tuple(weekend))
