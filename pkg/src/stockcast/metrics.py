"""Classification and regression evaluation measures, all in percent except r.

A metric whose denominator vanishes returns an :class:`Undefined` value, which
renders as ``NA`` and is never coerced to a number.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAPE_EPS = 1e-8


@dataclass(frozen=True)
class Undefined:
    reason: str = ""

    def __str__(self) -> str:
        return "NA"

    def __bool__(self) -> bool:
        return False


def is_defined(value) -> bool:
    return not isinstance(value, Undefined)


def fmt_metric(value, digits: int = 6) -> str:
    if value is None or isinstance(value, Undefined):
        return "NA"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.{digits}f}"


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def _pair(actual, predicted) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(actual)
    p = np.asarray(predicted)
    if a.shape != p.shape or a.ndim != 1:
        raise ValueError(f"length mismatch: {a.shape} vs {p.shape}")
    if a.size == 0:
        raise ValueError("empty sequences")
    return a, p


def confusion(actual, predicted) -> ConfusionMatrix:
    a, p = _pair(actual, predicted)
    if not (np.isin(a, (0, 1)).all() and np.isin(p, (0, 1)).all()):
        raise ValueError("labels must be 0 or 1")
    a = a.astype(bool)
    p = p.astype(bool)
    return ConfusionMatrix(
        tp=int(np.sum(a & p)), fp=int(np.sum(~a & p)), tn=int(np.sum(~a & ~p)), fn=int(np.sum(a & ~p))
    )


def _ratio(num: int, den: int, what: str):
    if den == 0:
        return Undefined(f"{what}: zero denominator")
    return 100.0 * num / den


def sensitivity(cm: ConfusionMatrix):
    return _ratio(cm.tp, cm.tp + cm.fn, "sensitivity")


def specificity(cm: ConfusionMatrix):
    return _ratio(cm.tn, cm.tn + cm.fp, "specificity")


def ppv(cm: ConfusionMatrix):
    return _ratio(cm.tp, cm.tp + cm.fp, "ppv")


def npv(cm: ConfusionMatrix):
    return _ratio(cm.tn, cm.tn + cm.fn, "npv")


def accuracy(cm: ConfusionMatrix):
    return _ratio(cm.tp + cm.tn, cm.total, "accuracy")


@dataclass(frozen=True)
class MapeResult:
    value: "float | Undefined"
    excluded: int


def mape(actual, predicted, eps: float = MAPE_EPS) -> MapeResult:
    """Mean of 100*|a-p|/|a| over points with |a| >= eps."""
    a, p = _pair(actual, predicted)
    a = a.astype(np.float64)
    p = p.astype(np.float64)
    keep = np.abs(a) >= eps
    excluded = int(a.size - keep.sum())
    if not keep.any():
        return MapeResult(Undefined("mape: every actual value is ~0"), excluded)
    return MapeResult(float(np.mean(100.0 * np.abs(a[keep] - p[keep]) / np.abs(a[keep]))), excluded)


def pearson(actual, predicted):
    a, p = _pair(actual, predicted)
    if a.size < 2:
        return Undefined("pearson: need n >= 2")
    a = a.astype(np.float64) - np.mean(a)
    p = p.astype(np.float64) - np.mean(p)
    saa = float(a @ a)
    spp = float(p @ p)
    if saa == 0.0 or spp == 0.0:
        return Undefined("pearson: constant sequence")
    r = float(a @ p) / np.sqrt(saa * spp)
    return float(min(1.0, max(-1.0, r)))


def matched_cases(actual_norm, predicted_norm) -> float:
    """Percent of positions where both values are up, or both are not up."""
    a, p = _pair(actual_norm, predicted_norm)
    return 100.0 * float(np.mean((a > 0) == (p > 0)))


@dataclass(frozen=True)
class ClassificationReport:
    cm: ConfusionMatrix
    sensitivity: object
    specificity: object
    ppv: object
    npv: object
    ca: object

    @property
    def n(self) -> int:
        return self.cm.total


@dataclass(frozen=True)
class RegressionReport:
    mape: object
    pearson: object
    matched_pct: float
    n: int
    mape_excluded: int = 0


def classification_report(actual, predicted) -> ClassificationReport:
    cm = confusion(actual, predicted)
    return ClassificationReport(cm, sensitivity(cm), specificity(cm), ppv(cm), npv(cm), accuracy(cm))


def regression_report(actual, predicted) -> RegressionReport:
    m = mape(actual, predicted)
    return RegressionReport(m.value, pearson(actual, predicted), matched_cases(actual, predicted), len(actual), m.excluded)
