"""Flat ``key = value`` run configuration.

Example::

    prices = data/nifty.csv
    moods = data/moods.csv
    train_end = 2017-12-29
    test_end = 2019-06-28
    mode = contemporaneous
    models = logistic, cart, regress:random_forest, lstm
    seed = 7
    models.cart.max_depth = 6
    models.lstm.epochs = 120
    sofnn.delta = 0.25
    granger.lags = 1, 2, 3

Blank lines and lines starting with ``#`` are ignored.  A model entry is an
algorithm name, optionally prefixed with ``classify:`` or ``regress:``; a bare
name means the classifier when one exists.  ``all`` expands to every model.
Relative paths resolve against the config file's directory.
"""
from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass, field
from datetime import date
from importlib import resources
from pathlib import Path

from .errors import ValidationError
from .harness import MODES
from .lstm import TrainConfig
from .models.base import CLASSIFIERS, DEFAULTS, REGRESSORS
from .sofnn import SofnnConfig

DEFAULT_TRAIN_END = date(2017, 12, 29)
DEFAULT_TEST_END = date(2019, 6, 28)
PATH_KEYS = ("prices", "features", "moods", "tweets", "lexicon")
_SCALAR_KEYS = {"train_end", "test_end", "mode", "models", "seed", "out", *PATH_KEYS}
_LSTM_FIELDS = {f.name for f in dataclasses.fields(TrainConfig)} - {"seed"}
_SOFNN_FIELDS = {f.name for f in dataclasses.fields(SofnnConfig)} - {"seed"}


def bundled(name: str) -> str:
    return str(resources.files("stockcast").joinpath("data", name))


def parse_value(text: str):
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    if low in ("none", "null"):
        return None
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def parse_lines(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValidationError(f"config line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ValidationError(f"config line {lineno}: empty key")
        if key in out:
            raise ValidationError(f"config line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


@dataclass(frozen=True)
class ModelEntry:
    algo: str
    task: str

    @property
    def label(self) -> str:
        return f"{self.algo}_{self.task}"


def parse_models(text: str) -> tuple[ModelEntry, ...]:
    entries: list[ModelEntry] = []
    for item in (s.strip() for s in text.split(",")):
        if not item:
            continue
        if item == "all":
            entries += [ModelEntry(a, "classify") for a in CLASSIFIERS]
            entries += [ModelEntry(a, "regress") for a in REGRESSORS]
            entries.append(ModelEntry("lstm", "regress"))
            continue
        task, _, algo = item.rpartition(":")
        if task and task not in ("classify", "regress"):
            raise ValidationError(f"unknown task prefix in model entry {item!r}")
        if algo == "lstm":
            if task == "classify":
                raise ValidationError("lstm is a regressor only")
            entries.append(ModelEntry("lstm", "regress"))
            continue
        if not task:
            task = "classify" if algo in CLASSIFIERS else "regress"
        if (algo, task) not in DEFAULTS:
            raise ValidationError(f"unknown model {item!r}")
        entries.append(ModelEntry(algo, task))
    seen, unique = set(), []
    for e in entries:
        if e not in seen:
            seen.add(e)
            unique.append(e)
    return tuple(unique)


@dataclass(frozen=True)
class RunConfig:
    prices: str = field(default_factory=lambda: bundled("nifty50_2015_2019.csv"))
    features: str | None = None
    moods: str | None = field(default_factory=lambda: bundled("moods_2015_2019.csv"))
    tweets: str | None = None
    lexicon: str | None = None
    train_end: date = DEFAULT_TRAIN_END
    test_end: date = DEFAULT_TEST_END
    mode: str = "contemporaneous"
    models: tuple[ModelEntry, ...] = field(default_factory=lambda: parse_models("all"))
    seed: int = 0
    out: str = "out"
    hyperparameters: dict = field(default_factory=dict)  # algo -> {name: value}
    lstm: dict = field(default_factory=dict)
    sofnn: dict = field(default_factory=dict)
    granger_lags: tuple[int, ...] = (1, 2, 3, 4, 5)
    canonical: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}")
        if not self.train_end < self.test_end:
            raise ValidationError("train_end must precede test_end")
        if not 0 <= self.seed < 1 << 64:
            raise ValidationError("seed must be an unsigned 64-bit integer")

    @property
    def config_hash(self) -> str:
        """Stable digest of every setting that affects results (the output directory excluded)."""
        items = dict(self.canonical)
        items["seed"] = str(self.seed)
        items["mode"] = self.mode
        items.pop("out", None)
        text = "\n".join(f"{k} = {v}" for k, v in sorted(items.items()))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]

    def hp_for(self, algo: str, task: str) -> dict:
        known = DEFAULTS[(algo, task)]
        return {k: v for k, v in self.hyperparameters.get(algo, {}).items() if k in known}

    def lstm_config(self) -> TrainConfig:
        return TrainConfig(**{**self.lstm, "seed": self.seed})

    def sofnn_config(self) -> SofnnConfig:
        return SofnnConfig(**{**self.sofnn, "seed": self.seed})


def _date(key: str, text: str) -> date:
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise ValidationError(f"{key} must be an ISO date, got {text!r}") from None


def build_config(pairs: dict[str, str], base_dir: Path | None = None, **overrides) -> RunConfig:
    """Turn parsed key/value pairs plus command-line overrides into a RunConfig."""
    pairs = dict(pairs)
    for k, v in overrides.items():
        if v is not None:
            pairs[k] = str(v)
    kw: dict = {}
    hps: dict[str, dict] = {}
    lstm: dict = {}
    sofnn: dict = {}
    for key, value in pairs.items():
        if key in PATH_KEYS:
            p = Path(value)
            if base_dir is not None and not p.is_absolute():
                p = base_dir / p
            kw[key] = str(p)
        elif key in ("train_end", "test_end"):
            kw[key] = _date(key, value)
        elif key == "mode":
            kw["mode"] = value
        elif key == "out":
            kw["out"] = value
        elif key == "seed":
            try:
                kw["seed"] = int(value)
            except ValueError:
                raise ValidationError(f"seed must be an integer, got {value!r}") from None
        elif key == "models":
            models = parse_models(value)
            if not models:
                raise ValidationError("model list is empty")
            kw["models"] = models
        elif key == "granger.lags":
            try:
                lags = tuple(int(s) for s in value.split(",") if s.strip())
            except ValueError:
                raise ValidationError(f"granger.lags must be integers, got {value!r}") from None
            if not lags or min(lags) < 1:
                raise ValidationError("granger.lags must be positive integers")
            kw["granger_lags"] = lags
        elif key.startswith("models.lstm."):
            name = key.split(".", 2)[2]
            if name not in _LSTM_FIELDS:
                raise ValidationError(f"unknown lstm setting {name!r}")
            lstm[name] = parse_value(value)
        elif key.startswith("sofnn."):
            name = key.split(".", 1)[1]
            if name not in _SOFNN_FIELDS:
                raise ValidationError(f"unknown sofnn setting {name!r}")
            sofnn[name] = parse_value(value)
        elif key.startswith("models."):
            parts = key.split(".")
            if len(parts) != 3:
                raise ValidationError(f"expected models.<algo>.<name>, got {key!r}")
            _, algo, name = parts
            if not any(a == algo and name in hp for (a, _), hp in DEFAULTS.items()):
                raise ValidationError(f"unknown hyperparameter {name!r} for {algo!r}")
            hps.setdefault(algo, {})[name] = parse_value(value)
        elif key not in _SCALAR_KEYS:
            raise ValidationError(f"unknown config key {key!r}")
    try:
        TrainConfig(**lstm)
        SofnnConfig(**sofnn)
    except (TypeError, ValueError) as exc:
        raise ValidationError(str(exc)) from None
    return RunConfig(**kw, hyperparameters=hps, lstm=lstm, sofnn=sofnn, canonical=tuple(sorted(pairs.items())))


def load_config(path: str | None, **overrides) -> RunConfig:
    """Read ``path`` (None means all defaults); OSError propagates for missing files."""
    if path is None:
        return build_config({}, None, **overrides)
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    return build_config(parse_lines(text), p.resolve().parent, **overrides)
