"""From-scratch LSTM regressor: MAE loss, ADAM, full backpropagation through time.

Gate blocks in every weight matrix are ordered input, forget, output,
candidate.  A window of ``seq_len`` standardized feature rows is unrolled and
a dense head maps the final hidden state to the five next close_norm values.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import features as F
from .errors import InsufficientDataError, NumericError, ShapeError
from .harness import HORIZON, ForecastWindow, SplitPlan, range_indices
from .rng import SplitMix64
from .stats import safe_std


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


@dataclass(frozen=True, eq=False)
class LstmParams:
    """All weights live in one flat vector; the named arrays are views into it."""

    flat: np.ndarray
    input_size: int
    hidden: int
    outputs: int = HORIZON

    @staticmethod
    def sizes(D: int, H: int, O: int) -> list[tuple[str, tuple[int, ...]]]:
        return [("W", (4 * H, D)), ("U", (4 * H, H)), ("b", (4 * H,)), ("V", (O, H)), ("c", (O,))]

    @classmethod
    def zeros(cls, D: int, H: int, O: int = HORIZON) -> "LstmParams":
        n = sum(int(np.prod(s)) for _, s in cls.sizes(D, H, O))
        return cls(np.zeros(n), D, H, O)

    def views(self) -> dict[str, np.ndarray]:
        out, k = {}, 0
        for name, shape in self.sizes(self.input_size, self.hidden, self.outputs):
            size = int(np.prod(shape))
            out[name] = self.flat[k : k + size].reshape(shape)
            k += size
        return out

    def __getattr__(self, name):
        if name in ("W", "U", "b", "V", "c"):
            return self.views()[name]
        raise AttributeError(name)

    def with_flat(self, flat: np.ndarray) -> "LstmParams":
        return LstmParams(flat, self.input_size, self.hidden, self.outputs)


@dataclass(frozen=True)
class LstmState:
    h: np.ndarray
    c: np.ndarray


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 80
    batch_size: int = 60
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seq_len: int = 10
    hidden: int = 32
    clip_norm: float = 5.0
    forget_bias: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be at least 1")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ValueError("ADAM betas must lie in (0, 1)")
        if self.seq_len < 1:
            raise ValueError("seq_len must be positive")


def init_params(D: int, cfg: TrainConfig, rng: SplitMix64) -> LstmParams:
    H = cfg.hidden
    p = LstmParams.zeros(D, H)
    bound = 1.0 / np.sqrt(H)
    p.flat[:] = rng.uniform(-bound, bound, p.flat.size)
    v = p.views()
    v["b"][:] = 0.0
    v["b"][H : 2 * H] = cfg.forget_bias
    v["c"][:] = 0.0
    return p


def lstm_cell(params: LstmParams, x: np.ndarray, state: LstmState) -> LstmState:
    x = np.asarray(x, dtype=np.float64)
    H = params.hidden
    if x.shape[-1] != params.input_size or state.h.shape[-1] != H or state.c.shape[-1] != H:
        raise ShapeError("input or state width does not match the parameters")
    v = params.views()
    z = x @ v["W"].T + state.h @ v["U"].T + v["b"]
    i = _sigmoid(z[..., :H])
    f = _sigmoid(z[..., H : 2 * H])
    o = _sigmoid(z[..., 2 * H : 3 * H])
    g = np.tanh(z[..., 3 * H :])
    c = f * state.c + i * g
    return LstmState(o * np.tanh(c), c)


def _forward(params: LstmParams, X: np.ndarray, keep: bool = False):
    """Batched unroll over X of shape (B, L, D); returns (outputs, cache)."""
    B, L, _ = X.shape
    H = params.hidden
    v = params.views()
    h = np.zeros((B, H))
    c = np.zeros((B, H))
    cache = []
    for t in range(L):
        z = X[:, t] @ v["W"].T + h @ v["U"].T + v["b"]
        i = _sigmoid(z[:, :H])
        f = _sigmoid(z[:, H : 2 * H])
        o = _sigmoid(z[:, 2 * H : 3 * H])
        g = np.tanh(z[:, 3 * H :])
        c_prev, h_prev = c, h
        c = f * c_prev + i * g
        tc = np.tanh(c)
        h = o * tc
        if not (np.all(np.isfinite(h)) and np.all(np.isfinite(c))):
            raise NumericError(f"non-finite LSTM state at step {t}")
        if keep:
            cache.append((X[:, t], h_prev, c_prev, i, f, o, g, tc))
    y = h @ v["V"].T + v["c"]
    if not np.all(np.isfinite(y)):
        raise NumericError("non-finite LSTM output at the dense head")
    return y, (cache, h)


def _backward(params: LstmParams, cache, dy: np.ndarray) -> np.ndarray:
    steps, h_last = cache
    H = params.hidden
    v = params.views()
    grad = LstmParams.zeros(params.input_size, H, params.outputs)
    gv = grad.views()
    gv["V"][:] = dy.T @ h_last
    gv["c"][:] = dy.sum(axis=0)
    dh = dy @ v["V"]
    dc = np.zeros_like(dh)
    for x, h_prev, c_prev, i, f, o, g, tc in reversed(steps):
        do = dh * tc
        dc = dc + dh * o * (1.0 - tc * tc)
        di = dc * g
        dg = dc * i
        df = dc * c_prev
        dz = np.concatenate(
            [di * i * (1.0 - i), df * f * (1.0 - f), do * o * (1.0 - o), dg * (1.0 - g * g)], axis=1
        )
        gv["W"] += dz.T @ x
        gv["U"] += dz.T @ h_prev
        gv["b"] += dz.sum(axis=0)
        dh = dz @ v["U"]
        dc = dc * f
    return grad.flat


def forward_sequence(params: LstmParams, window: np.ndarray, y_mean: float = 0.0, y_std: float = 1.0) -> np.ndarray:
    """Predict the five close_norm values (percent) for one standardized window."""
    window = np.asarray(window, dtype=np.float64)
    if window.ndim != 2 or window.shape[1] != params.input_size:
        raise ShapeError("window must be (seq_len, input_size)")
    y, _ = _forward(params, window[None])
    return y[0] * y_std + y_mean


def mae_loss(pred, target) -> float:
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ShapeError("prediction and target shapes differ")
    return float(np.mean(np.abs(pred - target)))


def loss_and_grad(params: LstmParams, X: np.ndarray, Y: np.ndarray) -> tuple[float, np.ndarray]:
    y, cache = _forward(params, X, keep=True)
    diff = y - Y
    # subgradient 0 at exact ties
    dy = np.sign(diff) / diff.size
    return float(np.mean(np.abs(diff))), _backward(params, cache, dy)


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray

    @classmethod
    def zeros(cls, n: int) -> "AdamState":
        return cls(np.zeros(n), np.zeros(n))


def adam_step(params: np.ndarray, grads: np.ndarray, state: AdamState, t: int, cfg: TrainConfig):
    """One bias-corrected ADAM update on a flat parameter vector."""
    if t < 1:
        raise ValueError("ADAM step counter starts at 1")
    grads = np.asarray(grads, dtype=np.float64)
    if grads.shape != params.shape:
        raise ShapeError("gradient shape does not match parameters")
    if not np.all(np.isfinite(grads)):
        raise NumericError("non-finite gradient")
    m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grads
    v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grads * grads
    m_hat = m / (1.0 - cfg.beta1**t)
    v_hat = v / (1.0 - cfg.beta2**t)
    new = params - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.eps)
    return new, AdamState(m, v)


def adam_step_bound(cfg: TrainConfig) -> float:
    """Largest possible per-coordinate ADAM move for this config."""
    ratio = (1.0 - cfg.beta1) / np.sqrt(1.0 - cfg.beta2)
    return cfg.learning_rate * max(1.0, ratio)


def clip_by_norm(g: np.ndarray, bound: float) -> np.ndarray:
    norm = float(np.sqrt(g @ g))
    if norm > bound:
        return g * (bound / norm)
    return g


def grad_check(params: LstmParams, window: np.ndarray, target: np.ndarray, n_coords: int = 100, step: float = 1e-5, seed: int = 0) -> float:
    """Max relative error between BPTT and central differences on sampled coordinates.

    Coordinates whose perturbation moves any output across its target (an MAE
    kink), or where an output already sits within 1e-8 of its target, are
    skipped.  Returns 0.0 if every sampled coordinate was skipped.
    """
    X = np.asarray(window, dtype=np.float64)[None]
    Y = np.asarray(target, dtype=np.float64)[None]
    _, grad = loss_and_grad(params, X, Y)
    base, _ = _forward(params, X)
    if np.any(np.abs(base - Y) < 1e-8):
        kinked = np.abs(base - Y) < 1e-8
    else:
        kinked = None
    rng = SplitMix64(seed)
    coords = rng.permutation(params.flat.size)[: min(n_coords, params.flat.size)]
    worst = 0.0
    flat = params.flat
    for k in coords:
        plus = flat.copy()
        plus[k] += step
        minus = flat.copy()
        minus[k] -= step
        yp, _ = _forward(params.with_flat(plus), X)
        ym, _ = _forward(params.with_flat(minus), X)
        sp, sm = np.sign(yp - Y), np.sign(ym - Y)
        if kinked is not None and np.any(kinked & ((yp != base) | (ym != base))):
            continue
        if np.any(sp != sm) or np.any(sp != np.sign(base - Y)):
            continue
        numeric = (np.mean(np.abs(yp - Y)) - np.mean(np.abs(ym - Y))) / (2.0 * step)
        analytic = grad[k]
        denom = max(abs(analytic), abs(numeric), 1e-7)
        worst = max(worst, abs(analytic - numeric) / denom)
    return worst


# ---------------------------------------------------------------- windows


def sequence_for(values: np.ndarray, anchor: int, targets: Sequence[int], mode: str, seq_len: int) -> np.ndarray | None:
    """Raw (unstandardized) input rows for one window, or None if history is short.

    lagged: the ``seq_len`` rows ending at the anchor.
    contemporaneous: ``seq_len - HORIZON`` rows ending at the anchor followed by
    the target rows with close_norm hidden (set to the training mean later) and
    zero-padding when the window is truncated.
    """
    if mode == "lagged":
        start = anchor - seq_len + 1
        if start < 0:
            return None
        return values[start : anchor + 1].copy()
    hist = seq_len - HORIZON
    if hist < 1:
        raise ValueError("contemporaneous mode needs seq_len > horizon")
    start = anchor - hist + 1
    if start < 0:
        return None
    out = np.full((seq_len, values.shape[1]), np.nan)
    out[:hist] = values[start : anchor + 1]
    for k, t in enumerate(targets):
        out[hist + k] = values[t]
        out[hist + k, F.CLOSE] = np.nan  # hidden: filled with the standardized mean (0)
    return out


@dataclass(frozen=True, eq=False)
class LstmModel:
    params: LstmParams
    config: TrainConfig
    mode: str
    x_mean: np.ndarray
    x_std: np.ndarray
    y_mean: float
    y_std: float
    loss_curve: tuple[float, ...] = field(default=())
    name: str = "lstm"
    task: str = "regress"

    @property
    def seed(self) -> int:
        return self.config.seed

    def standardize(self, raw: np.ndarray) -> np.ndarray:
        z = (raw - self.x_mean) / self.x_std
        return np.where(np.isnan(z), 0.0, z)

    def predict_windows(self, frame: F.FeatureFrame, windows: Sequence[ForecastWindow], mode: str) -> list:
        if mode != self.mode:
            raise ValueError(f"model was trained in {self.mode} mode")
        seqs, slots = [], []
        for k, w in enumerate(windows):
            raw = sequence_for(frame.values, w.anchor, w.targets, mode, self.config.seq_len)
            if raw is not None:
                seqs.append(self.standardize(raw))
                slots.append(k)
        out: list = [None] * len(windows)
        # One forward pass per window: BLAS sums stacked batches in a
        # size-dependent order, and a forecast must not depend on its batch mates.
        for k, seq in zip(slots, seqs):
            y, _ = _forward(self.params, seq[None])
            out[k] = (y[0] * self.y_std + self.y_mean)[: len(windows[k].targets)]
        return out

    def config_dict(self) -> dict:
        return {"config": asdict(self.config), "mode": self.mode}

    def state(self) -> dict:
        return {
            "flat": self.params.flat,
            "input_size": self.params.input_size,
            "x_mean": self.x_mean,
            "x_std": self.x_std,
            "y_mean": self.y_mean,
            "y_std": self.y_std,
            "loss_curve": list(self.loss_curve),
        }

    @classmethod
    def from_state(cls, spec: dict, s: dict) -> "LstmModel":
        cfg = TrainConfig(**spec["config"])
        params = LstmParams(s["flat"], int(s["input_size"]), cfg.hidden)
        return cls(params, cfg, spec["mode"], s["x_mean"], s["x_std"], float(s["y_mean"]), float(s["y_std"]), tuple(s["loss_curve"]))


def training_windows(frame: F.FeatureFrame, idx: np.ndarray, mode: str, seq_len: int):
    """Every anchor (stride 1) whose full five-day target block lies inside idx."""
    lo, hi = int(idx[0]), int(idx[-1])
    seqs, targets = [], []
    for anchor in range(lo - 1, hi - HORIZON + 1):
        tgt = list(range(anchor + 1, anchor + 1 + HORIZON))
        raw = sequence_for(frame.values, anchor, tgt, mode, seq_len)
        if raw is None:
            continue
        if mode == "contemporaneous" and anchor - (seq_len - HORIZON) + 1 < lo:
            continue
        if mode == "lagged" and anchor - seq_len + 1 < lo:
            continue
        seqs.append(raw)
        targets.append(frame.close_norm[tgt])
    return seqs, targets


def train_lstm(cfg: TrainConfig, frame: F.FeatureFrame, plan: SplitPlan | None = None, mode: str = "contemporaneous", on_step=None):
    """Fit on windows inside ``plan.train_range`` (whole frame when plan is None).

    Returns ``(model, loss_curve)``; the curve holds the mean training MAE of
    each epoch in standardized target units.  ``on_step(t, grad, update)`` is
    called after every ADAM step when given.
    """
    idx = np.arange(len(frame)) if plan is None else range_indices(frame, plan.train_range)
    if idx.size == 0:
        raise InsufficientDataError("empty training range")
    seqs, targets = training_windows(frame, idx, mode, cfg.seq_len)
    if not seqs:
        raise InsufficientDataError("not enough rows to form a single training window")
    rows = frame.values[idx]
    x_mean = rows.mean(axis=0)
    x_std = safe_std(rows)
    y_mean = float(frame.close_norm[idx].mean())
    y_std = float(safe_std(frame.close_norm[idx]))
    X = np.stack([np.where(np.isnan(s), 0.0, (s - x_mean) / x_std) for s in seqs])
    Y = (np.stack(targets) - y_mean) / y_std

    rng = SplitMix64(cfg.seed)
    params = init_params(X.shape[2], cfg, rng.child(0))
    adam = AdamState.zeros(params.flat.size)
    flat = params.flat.copy()
    t = 0
    curve = []
    n = X.shape[0]
    for epoch in range(cfg.epochs):
        order = rng.child(epoch + 1).permutation(n)
        total = 0.0
        for start in range(0, n, cfg.batch_size):
            b = order[start : start + cfg.batch_size]
            loss, grad = loss_and_grad(params.with_flat(flat), X[b], Y[b])
            total += loss * b.size
            grad = clip_by_norm(grad, cfg.clip_norm)
            t += 1
            new, adam = adam_step(flat, grad, adam, t, cfg)
            if on_step is not None:
                on_step(t, grad, new - flat)
            flat = new
        curve.append(total / n)
    model = LstmModel(params.with_flat(flat), cfg, mode, x_mean, x_std, y_mean, y_std, tuple(curve))
    return model, list(curve)


def loss_curve_csv(curve: Sequence[float], comment: str | None = None) -> str:
    lines = [f"# {comment}"] if comment else []
    lines.append("epoch,loss")
    lines += [f"{k + 1},{v!r}" for k, v in enumerate(curve)]
    return "\n".join(lines) + "\n"
