"""Case I / Case II splits, weekly forecast windows and run reports.

A window is a block of up to ``HORIZON`` consecutive trading days; its anchor
is the trading day just before the block.  Two input modes exist:

``contemporaneous``
    each target day contributes its own calendar, open, high, low, volume and
    range changes (everything but close_norm).
``lagged``
    each target day sees only the nine variables of the anchor and the four
    days before it, plus its own calendar fields.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import date
from typing import Callable, Protocol, Sequence

import numpy as np

from . import features as F
from . import metrics
from .errors import InsufficientDataError, ValidationError
from .models import base as shallow

HORIZON = 5
LAG_DEPTH = 5
MODES = ("contemporaneous", "lagged")
CASES = ("CaseI", "CaseII")

REPORT_HEADER = (
    "model",
    "task",
    "case",
    "mode",
    "sensitivity",
    "specificity",
    "ppv",
    "npv",
    "ca",
    "mape",
    "pearson",
    "matched_pct",
    "n",
    "seed",
    "status",
)


@dataclass(frozen=True)
class SplitPlan:
    case: str
    train_range: tuple[date, date]
    eval_range: tuple[date, date]


@dataclass(frozen=True)
class ForecastWindow:
    anchor: int  # frame index of the last known day; -1 if the block starts the frame
    targets: tuple[int, ...]


@dataclass(frozen=True)
class EvalRun:
    model: str
    task: str
    case: str
    mode: str
    dates: tuple[date, ...]
    actual: np.ndarray
    predicted: np.ndarray
    report: object
    seed: int
    skipped: tuple[int, ...] = ()  # anchors of windows that could not be built
    status: str = "ok"

    @property
    def n(self) -> int:
        return len(self.dates)


class Forecaster(Protocol):
    name: str
    task: str
    seed: int

    def predict_windows(self, frame: F.FeatureFrame, windows: Sequence[ForecastWindow], mode: str) -> list[np.ndarray]:
        ...


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def make_case_splits(frame: F.FeatureFrame, train_end: date, test_end: date) -> tuple[SplitPlan, SplitPlan]:
    for d in (train_end, test_end):
        if d not in frame.dates:
            raise ValidationError(f"{d.isoformat()} is not a trading day in the frame")
    if not train_end < test_end:
        raise ValidationError("train_end must precede test_end")
    i = frame.index_of(train_end)
    start = frame.dates[0]
    case1 = SplitPlan("CaseI", (start, train_end), (start, train_end))
    case2 = SplitPlan("CaseII", (start, train_end), (frame.dates[i + 1], test_end))
    return case1, case2


def range_indices(frame: F.FeatureFrame, rng: tuple[date, date]) -> np.ndarray:
    lo, hi = rng
    return np.array([i for i, d in enumerate(frame.dates) if lo <= d <= hi], dtype=np.int64)


def weekly_windows(rng: tuple[date, date], frame: F.FeatureFrame, horizon: int = HORIZON) -> list[ForecastWindow]:
    idx = range_indices(frame, rng)
    return [
        ForecastWindow(int(idx[s]) - 1, tuple(int(i) for i in idx[s : s + horizon]))
        for s in range(0, idx.size, horizon)
    ]


def lagged_inputs(values: np.ndarray, anchor: int, target: int) -> np.ndarray | None:
    """Nine variables at lags 0..4 from the anchor, then the target's calendar."""
    if anchor - (LAG_DEPTH - 1) < 0:
        return None
    history = values[anchor - LAG_DEPTH + 1 : anchor + 1][::-1].reshape(-1)
    return np.concatenate([history, values[target, list(F.CALENDAR)]])


def window_rows(frame: F.FeatureFrame, window: ForecastWindow, mode: str) -> np.ndarray | None:
    _check_mode(mode)
    v = frame.values
    if mode == "contemporaneous":
        return v[list(window.targets)][:, list(F.CONTEMPORANEOUS)]
    rows = [lagged_inputs(v, window.anchor, t) for t in window.targets]
    if any(r is None for r in rows):
        return None
    return np.vstack(rows)


def n_inputs(mode: str) -> int:
    return len(F.CONTEMPORANEOUS) if mode == "contemporaneous" else LAG_DEPTH * len(F.COLUMNS) + len(F.CALENDAR)


def targets_for(frame: F.FeatureFrame, idx, task: str) -> np.ndarray:
    idx = list(idx)
    if task == "classify":
        return frame.labels[idx]
    return frame.close_norm[idx]


def build_design(frame: F.FeatureFrame, windows: Sequence[ForecastWindow], mode: str, task: str):
    """Stack the rows of every buildable window: (X, y, target indices, skipped anchors)."""
    blocks, idx, skipped = [], [], []
    for w in windows:
        rows = window_rows(frame, w, mode)
        if rows is None:
            skipped.append(w.anchor)
            continue
        blocks.append(rows)
        idx.extend(w.targets)
    if not blocks:
        return np.empty((0, n_inputs(mode))), np.empty(0), np.empty(0, dtype=np.int64), skipped
    X = np.vstack(blocks)
    return X, targets_for(frame, idx, task), np.asarray(idx, dtype=np.int64), skipped


@dataclass
class ShallowForecaster:
    model: shallow.TrainedModel
    name: str = ""

    def __post_init__(self):
        self.name = self.name or self.model.spec.algo

    @property
    def task(self) -> str:
        return self.model.spec.task

    @property
    def seed(self) -> int:
        return self.model.spec.seed

    def predict_windows(self, frame, windows, mode):
        out = []
        for w in windows:
            rows = window_rows(frame, w, mode)
            out.append(None if rows is None else shallow.predict(self.model, rows))
        return out


def train_shallow(spec: shallow.ModelSpec, frame: F.FeatureFrame, plan: SplitPlan, mode: str) -> ShallowForecaster:
    """Fit on the same weekly-window rows a Case I evaluation would score."""
    X, y, _, _ = build_design(frame, weekly_windows(plan.train_range, frame), mode, spec.task)
    if X.shape[0] == 0:
        raise InsufficientDataError("no buildable training windows")
    return ShallowForecaster(shallow.fit(spec, X, y))


def evaluate(
    model: Forecaster,
    plan: SplitPlan,
    mode: str,
    frame: F.FeatureFrame,
    refit: Callable[[int], Forecaster] | None = None,
) -> EvalRun:
    """Forecast every weekly window of ``plan.eval_range`` and score the result.

    With ``refit`` given, a fresh model ``refit(anchor)`` trained on data up to
    each window's anchor makes that window's predictions.
    """
    _check_mode(mode)
    windows = weekly_windows(plan.eval_range, frame)
    if refit is None:
        preds = model.predict_windows(frame, windows, mode)
    else:
        preds = [refit(w.anchor).predict_windows(frame, [w], mode)[0] for w in windows]
    idx, out, skipped = [], [], []
    for w, p in zip(windows, preds):
        if p is None or not np.all(np.isfinite(p)):
            skipped.append(w.anchor)
            continue
        idx.extend(w.targets)
        out.append(np.asarray(p)[: len(w.targets)])
    if not idx:
        raise InsufficientDataError("no window in the evaluation range could be forecast")
    predicted = np.concatenate(out)
    actual = targets_for(frame, idx, model.task)
    if model.task == "classify":
        report = metrics.classification_report(actual.astype(np.int64), predicted.astype(np.int64))
    else:
        report = metrics.regression_report(actual, predicted)
    return EvalRun(
        model=model.name,
        task=model.task,
        case=plan.case,
        mode=mode,
        dates=tuple(frame.dates[i] for i in idx),
        actual=actual,
        predicted=predicted,
        report=report,
        seed=model.seed,
        skipped=tuple(skipped),
    )


def failed_run(name: str, task: str, case: str, mode: str, seed: int) -> EvalRun:
    return EvalRun(name, task, case, mode, (), np.empty(0), np.empty(0), None, seed, (), "failed")


def report_row(run: EvalRun) -> list[str]:
    fm = metrics.fmt_metric
    cells = [run.model, run.task, run.case, run.mode]
    rep = run.report
    if isinstance(rep, metrics.ClassificationReport):
        cells += [fm(rep.sensitivity), fm(rep.specificity), fm(rep.ppv), fm(rep.npv), fm(rep.ca), "NA", "NA", "NA"]
    elif isinstance(rep, metrics.RegressionReport):
        cells += ["NA"] * 5 + [fm(rep.mape), fm(rep.pearson), fm(rep.matched_pct)]
    else:
        cells += ["NA"] * 8
    cells += [str(run.n), str(run.seed), run.status]
    return cells


def report_csv(runs: Sequence[EvalRun], comment: str | None = None) -> str:
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_HEADER)
    for run in runs:
        writer.writerow(report_row(run))
    return buf.getvalue()


def predictions_csv(run: EvalRun, comment: str | None = None) -> str:
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    buf.write("date,actual,predicted\n")
    for d, a, p in zip(run.dates, run.actual, run.predicted):
        if run.task == "classify":
            buf.write(f"{d.isoformat()},{int(a)},{int(p)}\n")
        else:
            buf.write(f"{d.isoformat()},{float(a)!r},{float(p)!r}\n")
    return buf.getvalue()
