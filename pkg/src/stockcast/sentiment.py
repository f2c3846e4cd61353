"""Dated text -> per-trading-day (calm, happy, alert, kind) mood vectors."""
from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import date
from importlib import resources
from typing import Iterable, Sequence

import numpy as np

from .errors import FormatError, ValidationError

MOODS = ("calm", "happy", "alert", "kind")

_URL = re.compile(r"(?:https?://|www\.)\S+")
_MENTION = re.compile(r"@\w+")
_APOSTROPHE = re.compile(r"['’]")
_NON_LETTER = re.compile(r"[^a-z]+")

# Function words and market nouns carry no mood; dropping them keeps the
# lexicon from ever having to say anything about "nifty" or "the".
STOPWORDS = frozenset(
    """
    a an the and or but if of to in on at by for with from as is are was were be been being
    it its this that these those i me my we our you your he she they them their his her
    so too very just than then there here what which who whom how when where why
    do does did doing have has had having will would shall should can could may might must
    not no nor only own same such both each few more most other some any all
    about above after again against before below between during into through under until up
    out over off once further while because
    market markets stock stocks share shares nifty sensex index nse bse trader traders trading
    today day week rt amp via
    """.split()
)


def stem(token: str) -> str:
    """Strip one of -ing, -ed, -ly, -s when at least three letters remain."""
    for suffix in ("ing", "ed", "ly"):
        if token.endswith(suffix) and len(token) - len(suffix) >= 3:
            return token[: -len(suffix)]
    if token.endswith("s") and not token.endswith("ss") and len(token) - 1 >= 3:
        return token[:-1]
    return token


def normalize_text(text: str) -> list[str]:
    text = text.lower()
    text = _URL.sub(" ", text)
    text = _MENTION.sub(" ", text)
    text = text.replace("#", " ")
    text = _APOSTROPHE.sub("", text)
    text = _NON_LETTER.sub(" ", text)
    out = []
    for tok in text.split():
        if tok in STOPWORDS:
            continue
        s = stem(tok)
        if s in STOPWORDS:
            continue
        out.append(s)
    return out


@dataclass(frozen=True)
class TweetRecord:
    date: date
    text: str

    def __post_init__(self):
        if not self.text.strip():
            raise ValidationError(f"{self.date.isoformat()}: empty tweet text")


@dataclass(frozen=True)
class Lexicon:
    entries: dict  # stemmed token -> (mood, weight)

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "Lexicon":
        entries: dict[str, tuple[str, float]] = {}
        for lineno, line in enumerate(lines, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 3:
                raise FormatError(f"lexicon line {lineno}: expected token,mood,weight")
            token, mood, weight = parts[0].lower(), parts[1].lower(), float(parts[2])
            if mood not in MOODS:
                raise FormatError(f"lexicon line {lineno}: unknown mood {mood!r}")
            if not weight > 0:
                raise FormatError(f"lexicon line {lineno}: weight must be positive")
            key = stem(token)
            if key in entries and entries[key] != (mood, weight):
                raise FormatError(f"lexicon line {lineno}: {token!r} conflicts with an earlier entry")
            entries[key] = (mood, weight)
        return cls(entries)

    @classmethod
    def load(cls, path=None) -> "Lexicon":
        if path is None:
            text = resources.files("stockcast").joinpath("data/moods.lex").read_text(encoding="utf-8")
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        return cls.from_lines(text.splitlines())

    def scaled(self, factor: float) -> "Lexicon":
        return Lexicon({k: (m, w * factor) for k, (m, w) in self.entries.items()})


@dataclass(frozen=True)
class MoodVector:
    calm: float
    happy: float
    alert: float
    kind: float
    normalized: bool = True

    def as_array(self) -> np.ndarray:
        return np.array([self.calm, self.happy, self.alert, self.kind])


ZERO_MOOD = MoodVector(0.0, 0.0, 0.0, 0.0, True)


@dataclass(frozen=True, eq=False)
class MoodSeries:
    dates: tuple[date, ...]
    vectors: tuple[MoodVector, ...]
    coverage: np.ndarray  # True where at least one record fed the day

    def __len__(self) -> int:
        return len(self.dates)

    def matrix(self) -> np.ndarray:
        return np.array([v.as_array() for v in self.vectors]).reshape(len(self.vectors), 4)

    @property
    def coverage_pct(self) -> float:
        return 100.0 * float(np.mean(self.coverage)) if len(self) else 0.0


def score_day(tokens: Sequence[str], lexicon: Lexicon) -> MoodVector:
    raw = dict.fromkeys(MOODS, 0.0)
    for tok in sorted(tokens):  # fixed summation order regardless of input order
        hit = lexicon.entries.get(tok)
        if hit is not None:
            raw[hit[0]] += hit[1]
    total = sum(raw.values())
    if total <= 0:
        return ZERO_MOOD
    return MoodVector(*(raw[m] / total for m in MOODS), normalized=True)


def build_mood_series(records: Sequence[TweetRecord], lexicon: Lexicon, frame) -> MoodSeries:
    """Score records per trading day of ``frame``; non-trading days roll forward."""
    dates = tuple(frame.dates)
    if records and all(r.date > dates[-1] for r in records):
        raise ValidationError("every record is dated after the reference frame ends")
    ordinals = np.array([d.toordinal() for d in dates])
    per_day: list[list[str]] = [[] for _ in dates]
    seen = np.zeros(len(dates), dtype=bool)
    for rec in records:
        i = int(np.searchsorted(ordinals, rec.date.toordinal(), side="left"))
        if i >= len(dates):
            continue
        per_day[i].extend(normalize_text(rec.text))
        seen[i] = True
    vectors = tuple(score_day(toks, lexicon) for toks in per_day)
    return MoodSeries(dates, vectors, seen)


def parse_tweets(text: str) -> list[TweetRecord]:
    """``YYYY-MM-DD<TAB>text`` per line; blank lines ignored."""
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if "\t" not in line:
            raise FormatError(f"tweet line {lineno}: missing tab separator")
        day, body = line.split("\t", 1)
        try:
            d = date.fromisoformat(day.strip())
        except ValueError:
            raise FormatError(f"tweet line {lineno}: bad date {day!r}") from None
        if body.strip():
            out.append(TweetRecord(d, body))
    return out


def mood_csv(series: MoodSeries, comment: str | None = None) -> str:
    lines = [f"# {comment}"] if comment else []
    lines.append("date," + ",".join(MOODS))
    for d, v in zip(series.dates, series.vectors):
        lines.append(",".join([d.isoformat()] + [repr(float(x)) for x in v.as_array()]))
    return "\n".join(lines) + "\n"


def parse_mood_csv(text: str) -> MoodSeries:
    lines = [ln for ln in text.replace("\r\n", "\n").split("\n") if ln.strip() and not ln.startswith("#")]
    if not lines or [h.strip() for h in lines[0].split(",")] != ["date", *MOODS]:
        raise FormatError("mood CSV header must be date,calm,happy,alert,kind")
    dates, vectors = [], []
    for ln in lines[1:]:
        cells = [c.strip() for c in ln.split(",")]
        if len(cells) != 5:
            raise FormatError(f"bad mood row {ln!r}")
        vals = [float(c) for c in cells[1:]]
        if any(not np.isfinite(v) or v < 0 for v in vals):
            raise FormatError(f"mood scores must be finite and non-negative: {ln!r}")
        dates.append(date.fromisoformat(cells[0]))
        vectors.append(MoodVector(*vals, normalized=abs(sum(vals) - 1.0) < 1e-6))
    if any(b <= a for a, b in zip(dates, dates[1:])):
        raise FormatError("mood dates must be strictly increasing")
    return MoodSeries(tuple(dates), tuple(vectors), np.ones(len(dates), dtype=bool))


def align_to_frame(moods: MoodSeries, frame) -> MoodSeries:
    """Restrict a mood series to the frame's dates; every frame date must be present."""
    index = {d: i for i, d in enumerate(moods.dates)}
    missing = [d for d in frame.dates if d not in index]
    if missing:
        raise ValidationError(f"mood series lacks {len(missing)} frame dates, first {missing[0].isoformat()}")
    pick = [index[d] for d in frame.dates]
    return MoodSeries(tuple(frame.dates), tuple(moods.vectors[i] for i in pick), moods.coverage[pick])
