"""Bivariate Granger causality F-test and the mood-by-lag p-value grid."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import DegenerateTargetError, InsufficientDataError, SingularDesignError, ShapeError
from .metrics import Undefined, fmt_metric

RANK_TOL = 1e-10
MIN_DF = 10
_CF_TOL = 1e-15
_CF_MAX_ITER = 10_000
_TINY = 1e-300


def ols_fit(X, y) -> tuple[np.ndarray, float]:
    """Least squares through a QR factorization; returns (coefficients, RSS)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ShapeError(f"design {X.shape} does not match response {y.shape}")
    n, k = X.shape
    if n <= k:
        raise InsufficientDataError(f"need more rows than columns, got {n}x{k}")
    q, r = np.linalg.qr(X, mode="reduced")
    diag = np.abs(np.diag(r))
    scale = max(float(diag.max()), 1.0) if diag.size else 1.0
    if np.any(diag <= RANK_TOL * scale):
        raise SingularDesignError("design matrix is rank deficient")
    beta = np.linalg.solve(r, q.T @ y)
    resid = y - X @ beta
    return beta, float(resid @ resid)


def _betacf(x: float, a: float, b: float) -> float:
    # modified Lentz evaluation of the continued fraction for I_x(a, b)
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    d = _TINY if abs(d) < _TINY else d
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = _TINY if abs(d) < _TINY else d
        c = 1.0 + aa / c
        c = _TINY if abs(c) < _TINY else c
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = _TINY if abs(d) < _TINY else d
        c = 1.0 + aa / c
        c = _TINY if abs(c) < _TINY else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_TOL:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc_reg(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta I(x; a, b) for a, b > 0 and 0 <= x <= 1."""
    if not (a > 0 and b > 0):
        raise ValueError("shape parameters must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    log_front = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(x, a, b) / a
    return 1.0 - front * _betacf(1.0 - x, b, a) / b


def f_sf(f: float, d1: float, d2: float) -> float:
    """Survival function P(F > f) of the F distribution."""
    if f <= 0:
        return 1.0
    if math.isinf(f):
        return 0.0
    return betainc_reg(d2 / (d2 + d1 * f), d2 / 2.0, d1 / 2.0)


@dataclass(frozen=True)
class GrangerResult:
    lag: int
    f_stat: float
    p_value: float
    df_num: int
    df_den: int
    n_used: int


def _lag_matrix(series: np.ndarray, lag: int) -> np.ndarray:
    n = series.size
    return np.column_stack([series[lag - k : n - k] for k in range(1, lag + 1)])


def granger_p(x, y, lag: int) -> GrangerResult:
    """Does ``x`` help predict ``y`` beyond ``y``'s own ``lag`` lags?"""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ShapeError("cause and effect series must be 1-D with equal length")
    if lag < 1:
        raise ValueError("lag must be at least 1")
    n_used = y.size - lag
    df_den = n_used - 2 * lag - 1
    if df_den < MIN_DF:
        raise InsufficientDataError(f"series of length {y.size} too short for lag {lag}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("series must be finite")
    if np.ptp(y) == 0:
        raise DegenerateTargetError("effect series is constant")
    target = y[lag:]
    ones = np.ones((n_used, 1))
    restricted = np.hstack([ones, _lag_matrix(y, lag)])
    unrestricted = np.hstack([restricted, _lag_matrix(x, lag)])
    _, rss_r = ols_fit(restricted, target)
    _, rss_u = ols_fit(unrestricted, target)
    if rss_u <= 0:
        f_stat = math.inf if rss_r > 0 else 0.0
    else:
        f_stat = max(0.0, ((rss_r - rss_u) / lag) / (rss_u / df_den))
    return GrangerResult(lag, f_stat, f_sf(f_stat, lag, df_den), lag, df_den, n_used)


@dataclass(frozen=True)
class GrangerGrid:
    names: tuple[str, ...]
    lags: tuple[int, ...]
    cells: tuple[tuple[object, ...], ...]  # cells[lag_row][series_col]: GrangerResult or Undefined

    def p_values(self) -> np.ndarray:
        return np.array([[c.p_value if isinstance(c, GrangerResult) else np.nan for c in row] for row in self.cells])

    def to_csv(self, comment: str | None = None) -> str:
        lines = [f"# {comment}"] if comment else []
        lines.append("lag," + ",".join(self.names))
        for lag, row in zip(self.lags, self.cells):
            lines.append(f"{lag}," + ",".join(_cell(c) for c in row))
        return "\n".join(lines) + "\n"

    def to_text(self, comment: str | None = None) -> str:
        width = max(10, *(len(n) for n in self.names))
        lines = [f"# {comment}"] if comment else []
        lines.append("GRANGER TEST P-VALUES AT DIFFERENT LAGS")
        lines.append("Lag".ljust(5) + "".join(n.rjust(width + 2) for n in self.names))
        for lag, row in zip(self.lags, self.cells):
            lines.append(str(lag).ljust(5) + "".join(_cell(c).rjust(width + 2) for c in row))
        return "\n".join(lines) + "\n"


def _cell(c) -> str:
    return fmt_metric(c.p_value) if isinstance(c, GrangerResult) else "NA"


def granger_grid(causes: Mapping[str, Sequence[float]], effect, lags: Sequence[int] = (1, 2, 3, 4, 5)) -> GrangerGrid:
    """One test per (lag, cause); a cell that cannot be computed becomes NA."""
    names = tuple(causes)
    effect = np.asarray(effect, dtype=np.float64)
    rows = []
    for lag in lags:
        row = []
        for name in names:
            try:
                row.append(granger_p(causes[name], effect, lag))
            except (SingularDesignError, DegenerateTargetError, InsufficientDataError) as exc:
                row.append(Undefined(f"{name} lag {lag}: {exc}"))
        rows.append(tuple(row))
    return GrangerGrid(names, tuple(lags), tuple(rows))
