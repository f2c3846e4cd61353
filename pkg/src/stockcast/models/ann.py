"""Single-hidden-layer tanh network trained by full-batch gradient descent."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..rng import SplitMix64
from ..stats import safe_std
from .linear import _sigmoid


@dataclass(frozen=True, eq=False)
class MLP:
    W1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: float
    task: str
    y_mean: float = 0.0
    y_std: float = 1.0

    def _raw(self, X: np.ndarray) -> np.ndarray:
        return np.tanh(X @ self.W1 + self.b1) @ self.w2 + self.b2

    def decision(self, X: np.ndarray) -> np.ndarray:
        z = self._raw(X)
        if self.task == "classify":
            return _sigmoid(z)
        return z * self.y_std + self.y_mean

    def predict(self, X: np.ndarray) -> np.ndarray:
        if self.task == "classify":
            return (self.decision(X) > 0.5).astype(np.int64)
        return self.decision(X)

    def state(self) -> dict:
        return {
            "W1": self.W1,
            "b1": self.b1,
            "w2": self.w2,
            "b2": self.b2,
            "task": self.task,
            "y_mean": self.y_mean,
            "y_std": self.y_std,
        }

    @classmethod
    def from_state(cls, s: dict) -> "MLP":
        return cls(s["W1"], s["b1"], s["w2"], float(s["b2"]), s["task"], float(s["y_mean"]), float(s["y_std"]))


def fit_mlp(X, y, task, hp, rng: SplitMix64) -> MLP:
    n, d = X.shape
    h = int(hp["hidden"])
    lr = float(hp["learning_rate"])
    W1 = rng.uniform(-1.0, 1.0, (d, h)) / np.sqrt(d)
    b1 = np.zeros(h)
    w2 = rng.uniform(-1.0, 1.0, h) / np.sqrt(h)
    b2 = 0.0
    if task == "classify":
        target, y_mean, y_std = y.astype(np.float64), 0.0, 1.0
    else:
        y_mean = float(np.mean(y))
        y_std = float(safe_std(y))
        target = (y - y_mean) / y_std
    for _ in range(int(hp["iterations"])):
        a = np.tanh(X @ W1 + b1)
        z = a @ w2 + b2
        # both cross-entropy-with-sigmoid and squared error give (output - target)
        out = _sigmoid(z) if task == "classify" else z
        delta = (out - target) / n
        g_w2 = a.T @ delta
        g_b2 = float(delta.sum())
        back = np.outer(delta, w2) * (1.0 - a * a)
        g_W1 = X.T @ back
        g_b1 = back.sum(axis=0)
        W1 -= lr * g_W1
        b1 -= lr * g_b1
        w2 -= lr * g_w2
        b2 -= lr * g_b2
    return MLP(W1, b1, w2, b2, task, y_mean, y_std)
