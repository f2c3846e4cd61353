"""Self-organizing fuzzy neural network with ellipsoidal basis functions.

Layers, from input to output: the standardized input vector; one ellipsoidal
membership per rule (the per-dimension Gaussian product, computed in one go);
the rule firing; normalization of the firings to sum to one; and the weighted
sum of each rule's linear consequent ``w_i . x + b_i``.

The structure-learning recipe is our own, since the method is usually only
named.  A rule is added when a sample is predicted worse than ``delta``.  A
sample that is predicted well but covered by no rule above ``phi_min`` widens
the best-firing rule just enough to cover it (``coverage_action = "grow"``
adds a rule instead).  Consequents are refit jointly by ridge
least squares at the end of every epoch, and by default right after each
growth too, so one new rule does not distort the error seen by the next rows.
Every ``prune_every`` epochs, and once more when training stops, rules whose
mean normalized firing falls below ``prune_threshold`` are removed.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import features as F
from . import metrics
from .errors import InsufficientDataError, NumericError, ShapeError, ValidationError
from .harness import HORIZON, ForecastWindow, SplitPlan, range_indices
from .stats import safe_std

SIGMA_MIN = 1e-3
KAPPA = 0.5
RIDGE = 1e-6
UNDERFLOW = 1e-300
_LOG_UNDERFLOW = math.log(UNDERFLOW)
MOOD_LAGS = 3
CLOSE_LAGS = 3
N_MOODS = 4
INPUT_DIM = MOOD_LAGS * N_MOODS + CLOSE_LAGS

OK, GROW_ERROR, GROW_COVERAGE = "ok", "grow_error", "grow_coverage"


@dataclass(frozen=True)
class SofnnConfig:
    delta: float = 0.5
    phi_min: float = math.exp(-2.0)
    sigma0: float = 1.0
    sigma_min: float = SIGMA_MIN
    kappa: float = KAPPA
    ridge: float = RIDGE
    prune_threshold: float = 1e-3
    prune_every: int = 5
    max_neurons: int = 50
    epochs: int = 30
    min_improvement: float = 0.01
    refit_on_growth: bool = True
    coverage_action: str = "widen"
    seed: int = 0

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if not 0.0 <= self.phi_min < 1.0:
            raise ValueError("phi_min must lie in [0, 1)")
        if not (self.sigma0 > 0 and self.sigma_min > 0):
            raise ValueError("widths must be positive")
        if self.max_neurons < 1 or self.epochs < 1 or self.prune_every < 1:
            raise ValueError("max_neurons, epochs and prune_every must be at least 1")
        if self.coverage_action not in ("widen", "grow"):
            raise ValueError("coverage_action must be 'widen' or 'grow'")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SofnnConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in names})


@dataclass(frozen=True)
class EllipsoidalNeuron:
    center: np.ndarray
    widths: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.center, dtype=np.float64).reshape(-1)
        w = np.asarray(self.widths, dtype=np.float64).reshape(-1)
        if c.shape != w.shape:
            raise ShapeError("center and widths differ in length")
        if np.any(w < SIGMA_MIN):
            raise ValidationError(f"widths must be at least {SIGMA_MIN}")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "widths", w)


def membership(neuron: EllipsoidalNeuron, x) -> float:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape != neuron.center.shape:
        raise ShapeError(f"input has {x.size} dims, neuron has {neuron.center.size}")
    z = (x - neuron.center) / neuron.widths
    return math.exp(-0.5 * float(z @ z))


@dataclass(frozen=True, eq=False)
class RuleBase:
    """Rules stored column-wise: centers/widths (m, d), consequents (m, d + 1) = [w | b]."""

    centers: np.ndarray
    widths: np.ndarray
    consequents: np.ndarray

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.centers, dtype=np.float64))
        w = np.atleast_2d(np.asarray(self.widths, dtype=np.float64))
        q = np.atleast_2d(np.asarray(self.consequents, dtype=np.float64))
        if c.shape != w.shape or q.shape != (c.shape[0], c.shape[1] + 1):
            raise ShapeError(f"inconsistent rule arrays {c.shape}, {w.shape}, {q.shape}")
        if np.any(w < SIGMA_MIN):
            raise ValidationError(f"widths must be at least {SIGMA_MIN}")
        for name, arr in (("centers", c), ("widths", w), ("consequents", q)):
            object.__setattr__(self, name, arr)

    @classmethod
    def empty(cls, d: int) -> "RuleBase":
        return cls(np.empty((0, d)), np.empty((0, d)), np.empty((0, d + 1)))

    @classmethod
    def from_neurons(cls, neurons: Sequence[EllipsoidalNeuron], consequents) -> "RuleBase":
        return cls(
            np.array([n.center for n in neurons]),
            np.array([n.widths for n in neurons]),
            np.asarray(consequents, dtype=np.float64),
        )

    @property
    def size(self) -> int:
        return self.centers.shape[0]

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    @property
    def neurons(self) -> tuple[EllipsoidalNeuron, ...]:
        return tuple(EllipsoidalNeuron(c, w) for c, w in zip(self.centers, self.widths))

    def with_consequents(self, q) -> "RuleBase":
        return RuleBase(self.centers, self.widths, q)

    def without(self, i: int) -> "RuleBase":
        keep = np.arange(self.size) != i
        return RuleBase(self.centers[keep], self.widths[keep], self.consequents[keep])

    def permuted(self, order) -> "RuleBase":
        order = np.asarray(order)
        return RuleBase(self.centers[order], self.widths[order], self.consequents[order])


def log_firing(rb: RuleBase, X: np.ndarray) -> np.ndarray:
    """Log memberships, shape (n, m)."""
    Z = (X[:, None, :] - rb.centers[None, :, :]) / rb.widths[None, :, :]
    return -0.5 * np.einsum("nmd,nmd->nm", Z, Z)


def normalized_firing(rb: RuleBase, X: np.ndarray) -> np.ndarray:
    """Rule weights summing to one per row.

    Rows where every rule fires below 1e-300 fall back to the rule with the
    largest firing, i.e. the one nearest in its own width-scaled metric.
    """
    L = log_firing(rb, X)
    top = L.max(axis=1, keepdims=True)
    E = np.exp(L - top)
    psi = E / E.sum(axis=1, keepdims=True)
    lost = top[:, 0] < _LOG_UNDERFLOW
    if np.any(lost):
        psi[lost] = 0.0
        psi[lost, np.argmax(L[lost], axis=1)] = 1.0
    return psi


def consequent_outputs(rb: RuleBase, X: np.ndarray) -> np.ndarray:
    return X @ rb.consequents[:, :-1].T + rb.consequents[:, -1]


def forward_batch(rb: RuleBase, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if rb.size == 0:
        raise ValidationError("rule base has no neurons")
    if X.shape[1] != rb.dim:
        raise ShapeError(f"inputs have {X.shape[1]} dims, rules have {rb.dim}")
    out = np.sum(normalized_firing(rb, X) * consequent_outputs(rb, X), axis=1)
    if not np.all(np.isfinite(out)):
        raise NumericError("non-finite network output")
    return out


def sofnn_forward(rb: RuleBase, x) -> float:
    return float(forward_batch(rb, np.asarray(x, dtype=np.float64).reshape(1, -1))[0])


def criterion_check(rb: RuleBase, x, y: float, config: SofnnConfig) -> str:
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    if rb.size == 0:
        return GROW_COVERAGE
    if abs(y - forward_batch(rb, x)[0]) > config.delta:
        return GROW_ERROR
    if math.exp(float(log_firing(rb, x).max())) < config.phi_min:
        return GROW_COVERAGE
    return OK


def add_neuron(rb: RuleBase, x, y: float, config: SofnnConfig) -> RuleBase:
    """Centre a new rule at ``x`` whose consequent outputs ``y`` everywhere."""
    if rb.size >= config.max_neurons:
        raise ValidationError(f"rule base is at its capacity of {config.max_neurons} neurons")
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if rb.size == 0:
        width = config.sigma0
    else:
        nearest = float(np.min(np.sqrt(np.sum((rb.centers - x) ** 2, axis=1))))
        width = max(config.sigma_min, config.kappa * nearest)
    q = np.zeros(x.size + 1)
    q[-1] = y
    return RuleBase(
        np.vstack([rb.centers, x]),
        np.vstack([rb.widths, np.full(x.size, width)]),
        np.vstack([rb.consequents, q]),
    )


def widen_nearest(rb: RuleBase, x, phi_min: float) -> RuleBase:
    """Scale the widths of the best-firing rule so it fires exactly ``phi_min`` at ``x``."""
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    L = log_firing(rb, x)[0]
    k = int(np.argmax(L))
    if phi_min <= 0.0 or L[k] >= math.log(phi_min):
        return rb
    factor = math.sqrt(L[k] / math.log(phi_min))
    widths = rb.widths.copy()
    widths[k] *= factor
    return RuleBase(rb.centers, widths, rb.consequents)


def _design(rb: RuleBase, X: np.ndarray) -> np.ndarray:
    psi = normalized_firing(rb, X)
    Xa = np.hstack([X, np.ones((X.shape[0], 1))])
    return (psi[:, :, None] * Xa[:, None, :]).reshape(X.shape[0], -1)


def fit_consequents(rb: RuleBase, X, y, ridge: float = RIDGE, sample_weight=None) -> RuleBase:
    """Joint ridge least squares for every consequent, firing-weighted."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if X.shape[0] == 0 or X.shape[0] != y.size:
        raise ShapeError("need at least one row and matching targets")
    w = np.ones(y.size) if sample_weight is None else np.asarray(sample_weight, dtype=np.float64)
    Z = _design(rb, X)
    Zw = Z * w[:, None]
    A = Z.T @ Zw + ridge * np.eye(Z.shape[1])
    theta = np.linalg.solve(A, Zw.T @ y)
    return rb.with_consequents(theta.reshape(rb.size, rb.dim + 1))


def prune(rb: RuleBase, X, y, config: SofnnConfig) -> RuleBase:
    """Drop rarely-firing rules (never the last one), then refit consequents."""
    if rb.size < 2:
        return rb
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    usage = normalized_firing(rb, X).mean(axis=0)
    keep = usage >= config.prune_threshold
    if not keep.any():
        keep[int(np.argmax(usage))] = True
    if keep.all():
        return rb
    slim = RuleBase(rb.centers[keep], rb.widths[keep], rb.consequents[keep])
    return fit_consequents(slim, X, y, config.ridge)


@dataclass(frozen=True)
class TrainEvent:
    epoch: int
    kind: str  # grow_error | grow_coverage | widen | refused | prune | fit
    neurons: int


@dataclass(frozen=True, eq=False)
class SofnnModel:
    rules: RuleBase
    x_mean: np.ndarray
    x_std: np.ndarray
    config: SofnnConfig
    history: tuple[TrainEvent, ...] = ()
    epoch_mape: tuple[float, ...] = ()
    name: str = "sofnn"
    task: str = "regress"

    @property
    def seed(self) -> int:
        return self.config.seed

    @property
    def n_neurons(self) -> int:
        return self.rules.size

    def standardize(self, X) -> np.ndarray:
        return (np.atleast_2d(np.asarray(X, dtype=np.float64)) - self.x_mean) / self.x_std

    def predict(self, X) -> np.ndarray:
        return forward_batch(self.rules, self.standardize(X))

    def config_dict(self) -> dict:
        return self.config.to_dict()

    def state(self) -> dict:
        return {
            "centers": self.rules.centers,
            "widths": self.rules.widths,
            "consequents": self.rules.consequents,
            "x_mean": self.x_mean,
            "x_std": self.x_std,
            "epoch_mape": list(self.epoch_mape),
        }

    @classmethod
    def from_state(cls, spec: dict, s: dict) -> "SofnnModel":
        return cls(
            RuleBase(s["centers"], s["widths"], s["consequents"]),
            np.asarray(s["x_mean"]),
            np.asarray(s["x_std"]),
            SofnnConfig.from_dict(spec),
            epoch_mape=tuple(s.get("epoch_mape", ())),
        )


def _mape_value(y, pred) -> float:
    v = metrics.mape(y, pred).value
    return float(v) if metrics.is_defined(v) else math.inf


def fit_sofnn(config: SofnnConfig, X, y, on_event: Callable[[TrainEvent], None] | None = None) -> SofnnModel:
    """Grow, fit and prune a rule base on raw inputs ``X`` and targets ``y``."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if X.shape[0] != y.size:
        raise ShapeError("inputs and targets differ in length")
    if y.size < 2:
        raise InsufficientDataError("need at least two training rows")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValidationError("training data must be finite")
    x_mean = X.mean(axis=0)
    x_std = safe_std(X)
    Xs = (X - x_mean) / x_std

    events: list[TrainEvent] = []

    def log(epoch: int, kind: str, rb: RuleBase) -> None:
        ev = TrainEvent(epoch, kind, rb.size)
        events.append(ev)
        if on_event is not None:
            on_event(ev)

    rb = add_neuron(RuleBase.empty(X.shape[1]), Xs[0], y[0], config)
    rb = fit_consequents(rb, Xs, y, config.ridge)
    log(0, "fit", rb)
    curve: list[float] = []
    for epoch in range(1, config.epochs + 1):
        for i in range(y.size):
            verdict = criterion_check(rb, Xs[i], y[i], config)
            if verdict == OK:
                continue
            if verdict == GROW_COVERAGE and config.coverage_action == "widen":
                rb = widen_nearest(rb, Xs[i], config.phi_min)
                log(epoch, "widen", rb)
                continue
            if rb.size >= config.max_neurons:
                log(epoch, "refused", rb)
                continue
            rb = add_neuron(rb, Xs[i], y[i], config)
            log(epoch, verdict, rb)
            if config.refit_on_growth:
                rb = fit_consequents(rb, Xs, y, config.ridge)
        rb = fit_consequents(rb, Xs, y, config.ridge)
        log(epoch, "fit", rb)
        score = _mape_value(y, forward_batch(rb, Xs))
        stalled = epoch > 1 and curve[-1] - score < config.min_improvement
        if epoch % config.prune_every == 0 or stalled or epoch == config.epochs:
            pruned = prune(rb, Xs, y, config)
            if pruned.size != rb.size:
                rb = pruned
                log(epoch, "prune", rb)
                score = _mape_value(y, forward_batch(rb, Xs))
        curve.append(score)
        if stalled:
            break
    return SofnnModel(rb, x_mean, x_std, config, tuple(events), tuple(curve))


def sofnn_inputs(moods: np.ndarray, close: np.ndarray, t: int) -> np.ndarray | None:
    """Mood rows t-1..t-3 (four values each) then close_norm t-1..t-3."""
    if t - max(MOOD_LAGS, CLOSE_LAGS) < 0:
        return None
    mood_part = moods[t - MOOD_LAGS : t][::-1].reshape(-1)
    close_part = close[t - CLOSE_LAGS : t][::-1]
    return np.concatenate([mood_part, close_part])


def _aligned(moods, frame: F.FeatureFrame) -> np.ndarray:
    if tuple(moods.dates) != tuple(frame.dates):
        raise ValidationError("mood series and feature frame are not aligned on dates")
    return moods.matrix()


def train_sofnn(config: SofnnConfig, moods, frame: F.FeatureFrame, plan: SplitPlan | None = None, on_event=None) -> "SofnnForecaster":
    M = _aligned(moods, frame)
    close = frame.close_norm
    idx = range_indices(frame, plan.train_range) if plan is not None else np.arange(len(frame))
    rows, ys = [], []
    for t in idx:
        x = sofnn_inputs(M, close, int(t))
        if x is not None:
            rows.append(x)
            ys.append(close[t])
    if len(rows) < 30:
        raise InsufficientDataError(f"need at least 30 usable rows, got {len(rows)}")
    model = fit_sofnn(config, np.array(rows), np.array(ys), on_event)
    return SofnnForecaster(model, M)


def predict_week(model: SofnnModel, mood_history, close_history, horizon: int = HORIZON) -> np.ndarray:
    """Recursive multi-step forecast from the latest known rows.

    Each prediction becomes the next step's close lag 1.  Future moods are
    unknown, so the last observed mood row is repeated.
    """
    moods = [np.asarray(r, dtype=np.float64) for r in np.atleast_2d(mood_history)]
    close = [float(v) for v in np.asarray(close_history, dtype=np.float64).reshape(-1)]
    if len(moods) < MOOD_LAGS or len(close) < CLOSE_LAGS:
        raise InsufficientDataError(f"need {MOOD_LAGS} mood rows and {CLOSE_LAGS} close values of history")
    last_mood = moods[-1]
    out = np.empty(horizon)
    for k in range(horizon):
        x = np.concatenate([*moods[: -MOOD_LAGS - 1 : -1], close[: -CLOSE_LAGS - 1 : -1]])
        out[k] = model.predict(x)[0]
        close.append(out[k])
        moods.append(last_mood)
    return out


@dataclass
class SofnnForecaster:
    model: SofnnModel
    moods: np.ndarray = field(repr=False)  # aligned mood matrix (n, 4)
    name: str = "sofnn"
    task: str = "regress"

    @property
    def seed(self) -> int:
        return self.model.seed

    def predict_windows(self, frame: F.FeatureFrame, windows: Sequence[ForecastWindow], mode: str) -> list:
        if self.moods.shape[0] != len(frame):
            raise ValidationError("mood matrix does not match the frame")
        close = frame.close_norm
        out = []
        for w in windows:
            a = w.anchor
            if a - max(MOOD_LAGS, CLOSE_LAGS) + 1 < 0:
                out.append(None)
                continue
            lo = a + 1 - max(MOOD_LAGS, CLOSE_LAGS)
            out.append(predict_week(self.model, self.moods[lo : a + 1], close[lo : a + 1], len(w.targets)))
        return out
