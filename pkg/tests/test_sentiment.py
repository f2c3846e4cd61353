from datetime import date

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stockcast import sentiment as M
from stockcast.errors import FormatError, ValidationError

from conftest import synthetic_frame

LEX = M.Lexicon.from_lines(["calm,calm,1.0", "alert,alert,2.0", "happy,happy,1.0", "kind,kind,0.5", "joy,happy,3.0"])


# ------------------------------------------------------------ text


def test_normalize_examples():
    assert M.normalize_text("Markets CALMING down https://t.co/x") == ["calm", "down"]
    assert M.normalize_text("@nse50 #happy!!!") == ["happy"]
    assert M.normalize_text("") == []


def test_normalize_strips_digits_and_punctuation():
    assert M.normalize_text("Up 2.5% on 12/03, ALERTED!") == ["alert"]
    assert M.normalize_text("www.example.com kindly") == ["kind"]


def test_stem_rules_respect_minimum_stem():
    assert M.stem("calming") == "calm"
    assert M.stem("alerted") == "alert"
    assert M.stem("kindly") == "kind"
    assert M.stem("bears") == "bear"
    assert M.stem("sing") == "sing"  # stem would be 1 letter
    assert M.stem("bed") == "bed"
    assert M.stem("gas") == "gas"
    assert M.stem("boss") == "boss"


# ------------------------------------------------------------ lexicon


def test_lexicon_parsing_errors():
    with pytest.raises(FormatError):
        M.Lexicon.from_lines(["calm,calm"])
    with pytest.raises(FormatError):
        M.Lexicon.from_lines(["calm,sleepy,1"])
    with pytest.raises(FormatError):
        M.Lexicon.from_lines(["calm,calm,0"])
    with pytest.raises(FormatError):
        M.Lexicon.from_lines(["calm,calm,1", "calm,happy,1"])


def test_bundled_lexicon_loads():
    lex = M.Lexicon.load()
    assert len(lex.entries) > 150
    assert lex.entries["calm"] == ("calm", 1.0)
    assert all(k == k.lower() for k in lex.entries)


# ------------------------------------------------------------ scoring


def test_score_examples():
    assert M.score_day(["down", "market"], LEX) == M.ZERO_MOOD
    assert M.score_day(["calm"], LEX).as_array().tolist() == [1.0, 0.0, 0.0, 0.0]
    v = M.score_day(["calm", "alert", "calm"], LEX)
    assert v.as_array().tolist() == [0.5, 0.0, 0.5, 0.0]


def test_score_hand_sum():
    v = M.score_day(["joy", "kind", "calm", "zzz"], LEX)
    total = 3.0 + 0.5 + 1.0
    assert np.allclose(v.as_array(), [1.0 / total, 3.0 / total, 0.0, 0.5 / total], atol=1e-15)


tokens = st.lists(st.sampled_from(["calm", "alert", "happy", "kind", "joy", "noise", "down"]), max_size=20)


@given(tokens, st.randoms(use_true_random=False))
def test_score_permutation_invariant(toks, rnd):
    shuffled = list(toks)
    rnd.shuffle(shuffled)
    assert M.score_day(toks, LEX) == M.score_day(shuffled, LEX)


@given(tokens, st.floats(0.01, 100.0))
def test_score_weight_scale_invariant(toks, factor):
    a = M.score_day(toks, LEX).as_array()
    b = M.score_day(toks, LEX.scaled(factor)).as_array()
    assert np.allclose(a, b, atol=1e-12)


@given(tokens)
def test_normalized_vectors_sum_to_one(toks):
    v = M.score_day(toks, LEX).as_array()
    assert np.all(v >= 0)
    assert v.sum() == 0.0 or abs(v.sum() - 1.0) < 1e-12


# ------------------------------------------------------------ series


def frame_of(days):
    return synthetic_frame(days)


def test_weekend_tweet_rolls_to_monday():
    frame = frame_of(10)  # starts Monday 2016-01-04
    recs = [M.TweetRecord(date(2016, 1, 9), "so calm")]
    series = M.build_mood_series(recs, LEX, frame)
    monday = frame.dates.index(date(2016, 1, 11))
    assert series.vectors[monday].calm == 1.0
    assert series.coverage.sum() == 1


def test_no_records_gives_zero_series():
    frame = frame_of(7)
    series = M.build_mood_series([], LEX, frame)
    assert len(series) == len(frame)
    assert all(v == M.ZERO_MOOD for v in series.vectors)
    assert series.coverage_pct == 0.0


def test_series_matches_per_day_scores():
    frame = frame_of(5)
    recs = [
        M.TweetRecord(date(2016, 1, 4), "calm and happy"),
        M.TweetRecord(date(2016, 1, 4), "ALERT alert"),
        M.TweetRecord(date(2016, 1, 6), "kindly"),
    ]
    series = M.build_mood_series(recs, LEX, frame)
    assert series.vectors[0] == M.score_day(["calm", "happy", "alert", "alert"], LEX)
    assert series.vectors[1] == M.ZERO_MOOD
    assert series.vectors[2] == M.score_day(["kind"], LEX)
    assert series.coverage.tolist() == [True, False, True, False, False]


def test_records_after_frame_rejected():
    frame = frame_of(5)
    with pytest.raises(ValidationError):
        M.build_mood_series([M.TweetRecord(date(2020, 1, 1), "calm")], LEX, frame)


@given(st.integers(1, 40), st.lists(st.integers(-5, 60), max_size=30))
def test_series_length_equals_frame(n, offsets):
    frame = frame_of(n)
    recs = [M.TweetRecord(date.fromordinal(frame.dates[0].toordinal() + k), "happy calm") for k in offsets]
    if recs and all(r.date > frame.dates[-1] for r in recs):
        return
    assert len(M.build_mood_series(recs, LEX, frame)) == len(frame)


def test_empty_tweet_rejected():
    with pytest.raises(ValidationError):
        M.TweetRecord(date(2016, 1, 4), "   ")


# ------------------------------------------------------------ files


def test_tweet_file_parsing():
    recs = M.parse_tweets("2016-01-04\tcalm day\n\n2016-01-05\tso kind\n")
    assert [r.date for r in recs] == [date(2016, 1, 4), date(2016, 1, 5)]
    with pytest.raises(FormatError):
        M.parse_tweets("2016-01-04 no tab")
    with pytest.raises(FormatError):
        M.parse_tweets("04/01/2016\tcalm")


def test_mood_csv_round_trip():
    frame = frame_of(6)
    recs = [M.TweetRecord(d, t) for d, t in zip(frame.dates, ["calm", "joy kind", "alert", "x y", "happy", "calm alert"])]
    series = M.build_mood_series(recs, LEX, frame)
    back = M.parse_mood_csv(M.mood_csv(series, "hdr"))
    assert back.dates == series.dates
    assert np.array_equal(back.matrix(), series.matrix())


def test_mood_csv_errors():
    with pytest.raises(FormatError):
        M.parse_mood_csv("day,calm,happy,alert,kind\n")
    with pytest.raises(FormatError):
        M.parse_mood_csv("date,calm,happy,alert,kind\n2016-01-04,1,0,0,-1\n")
    with pytest.raises(FormatError):
        M.parse_mood_csv("date,calm,happy,alert,kind\n2016-01-05,1,0,0,0\n2016-01-04,1,0,0,0\n")


def test_align_to_frame():
    frame = frame_of(5)
    wide = M.build_mood_series([], LEX, frame_of(8))
    assert M.align_to_frame(wide, frame).dates == frame.dates
    with pytest.raises(ValidationError):
        M.align_to_frame(M.build_mood_series([], LEX, frame_of(3)), frame)


def test_bundled_sample_scores(data_dir):
    text = (data_dir / "tweets_sample.tsv").read_text(encoding="utf-8")
    recs = M.parse_tweets(text)
    assert recs
    series = M.build_mood_series(recs, M.Lexicon.load(), frame_of(400))
    assert series.coverage.any()
