"""Regenerate the bundled data files under src/stockcast/data.

The sandbox this package was built in has no access to market data, so the
NIFTY 50 file is a synthetic stand-in: a GARCH(1,1) daily return path with
NIFTY-like drift and volatility, overnight gaps, intraday extremes and a
volume process, laid on an NSE-style trading calendar for 2015-01-02 to
2019-06-28.  Replace it with a real export (same header) for real studies.

The mood file is likewise synthetic.  Its calm component carries a planted
lead over close_norm so the Granger grid has something to find.

    python tools/make_fixtures.py
"""
from __future__ import annotations

import math
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from stockcast.features import derive_features
from stockcast.market_data import OhlcvBar, PriceSeries, serialize_ohlcv
from stockcast.rng import SplitMix64
from stockcast.sentiment import MoodSeries, MoodVector, mood_csv

DATA = Path(__file__).resolve().parents[1] / "src" / "stockcast" / "data"
SEED = 20150102

# Weekday exchange holidays, plus 2016-06-13 and 2018-01-01 which are simply
# missing from the source export.
HOLIDAYS = """
2015-01-26 2015-02-17 2015-03-06 2015-04-02 2015-04-03 2015-04-14 2015-05-01
2015-09-17 2015-09-25 2015-10-02 2015-10-22 2015-11-12 2015-11-25 2015-12-25
2016-01-26 2016-03-07 2016-03-24 2016-03-25 2016-04-14 2016-04-15 2016-04-19
2016-06-13 2016-07-06 2016-08-15 2016-09-05 2016-09-13 2016-10-11 2016-10-12
2016-10-31 2016-11-14
2017-01-26 2017-02-24 2017-03-13 2017-04-04 2017-04-14 2017-05-01 2017-06-26
2017-08-15 2017-08-25 2017-10-02 2017-10-19 2017-10-20 2017-12-25
2018-01-01 2018-01-26 2018-02-13 2018-03-02 2018-03-29 2018-03-30 2018-05-01
2018-08-15 2018-08-22 2018-09-13 2018-09-20 2018-10-02 2018-10-18 2018-11-08
2018-11-23 2018-12-25
2019-03-04 2019-03-21 2019-04-17 2019-04-19 2019-04-29 2019-05-01 2019-06-05
"""


def trading_days(start: date, end: date) -> list[date]:
    closed = {date.fromisoformat(s) for s in HOLIDAYS.split()}
    out, d = [], start
    while d <= end:
        if d.weekday() < 5 and d not in closed:
            out.append(d)
        d += timedelta(days=1)
    return out


def synth_prices(days: list[date], rng: SplitMix64) -> PriceSeries:
    n = len(days)
    z = rng.normal(n)
    gap_z = rng.normal(n)
    hi_z = np.abs(rng.normal(n))
    lo_z = np.abs(rng.normal(n))
    vol_z = rng.normal(n)
    # GARCH(1,1) with unconditional daily sd ~0.85%
    omega, a, b = 0.0723e-5, 0.08, 0.91
    var = omega / (1 - a - b)
    mu = 0.00032
    close = 8272.8
    log_vol = math.log(1.6e5)
    bars = []
    for t in range(n):
        sd = math.sqrt(var)
        r = mu + sd * z[t]
        # part of the day's move happens overnight
        gap = 0.3 * (r - mu) + 0.25 * sd * gap_z[t]
        prev = close
        open_ = prev * math.exp(gap)
        close = prev * math.exp(r)
        high = max(open_, close) * math.exp(0.45 * sd * hi_z[t])
        low = min(open_, close) * math.exp(-0.45 * sd * lo_z[t])
        log_vol = 0.8 * log_vol + 0.2 * math.log(1.6e5) + 0.25 * vol_z[t] + 8.0 * abs(r - mu)
        bars.append(
            OhlcvBar(days[t], round(open_, 2), round(max(high, open_, close), 2), round(min(low, open_, close), 2), round(close, 2), float(round(math.exp(log_vol), -2)))
        )
        var = omega + a * (r - mu) ** 2 + b * var
    return PriceSeries(tuple(bars))


def synth_moods(series: PriceSeries, rng: SplitMix64) -> MoodSeries:
    frame = derive_features(series)
    cn = frame.close_norm
    n = len(cn)
    noise = rng.uniform(0.0, 1.0, (n, 4))
    lead = np.zeros(n)
    lead[:-1] = cn[1:]  # calm on day t anticipates the close change of day t+1
    raw = np.empty((n, 4))
    raw[:, 0] = np.clip(1.0 + 0.03 * lead + 0.6 * noise[:, 0], 0.05, None)
    raw[:, 1] = np.clip(1.0 + 0.012 * np.roll(lead, 1) + 0.6 * noise[:, 1], 0.05, None)
    raw[:, 2] = 0.8 + 0.6 * noise[:, 2]
    raw[:, 3] = 0.9 + 0.6 * noise[:, 3]
    raw /= raw.sum(axis=1, keepdims=True)
    vectors = tuple(MoodVector(*(round(float(x), 6) for x in row), normalized=True) for row in raw)
    return MoodSeries(frame.dates, vectors, np.ones(n, dtype=bool))


SAMPLE_TWEETS = [
    ("2015-01-02", "Calm start to the year, #nifty steady and relaxed"),
    ("2015-01-02", "Happy new year traders! Optimistic about banks https://t.co/abc"),
    ("2015-01-03", "Weekend thoughts: markets look peaceful, feeling grateful"),
    ("2015-01-05", "ALERT: crude falling fast, watch out for panic selling"),
    ("2015-01-05", "@nse50 so worried about the volatility today"),
    ("2015-01-06", "Kind words from the RBI governor, supportive tone #policy"),
    ("2015-01-06", "Nervous session, traders cautious ahead of data"),
    ("2015-01-07", "Cheerful rally!!! bulls delighted, great day"),
    ("2015-01-08", "Steady and composed recovery, serene close"),
    ("2015-01-09", "Thankful for the generous dividend announcements"),
]


def main() -> None:
    days = trading_days(date(2015, 1, 2), date(2019, 6, 28))
    series = synth_prices(days, SplitMix64(SEED))
    (DATA / "nifty50_2015_2019.csv").write_text(serialize_ohlcv(series), encoding="utf-8")
    moods = synth_moods(series, SplitMix64(SEED).child(1))
    (DATA / "moods_2015_2019.csv").write_text(mood_csv(moods), encoding="utf-8")
    (DATA / "tweets_sample.tsv").write_text("".join(f"{d}\t{t}\n" for d, t in SAMPLE_TWEETS), encoding="utf-8")
    in_train = sum(1 for d in days if d <= date(2017, 12, 29))
    print(f"{len(days)} bars, {in_train - 1} feature rows up to 2017-12-29")


if __name__ == "__main__":
    main()
