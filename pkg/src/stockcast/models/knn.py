"""k-nearest-neighbour majority vote."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class KNN:
    X: np.ndarray
    y: np.ndarray
    k: int

    def neighbours(self, X: np.ndarray) -> np.ndarray:
        out = np.empty((X.shape[0], self.k), dtype=np.int64)
        for start in range(0, X.shape[0], 64):
            block = X[start : start + 64]
            d2 = np.sum((block[:, None, :] - self.X[None, :, :]) ** 2, axis=2)
            # stable sort: equal distances resolve to the lower training row
            out[start : start + 64] = np.argsort(d2, axis=1, kind="stable")[:, : self.k]
        return out

    def decision(self, X: np.ndarray) -> np.ndarray:
        """Fraction of neighbours voting 1."""
        return self.y[self.neighbours(X)].mean(axis=1)

    def predict(self, X: np.ndarray) -> np.ndarray:
        votes = self.y[self.neighbours(X)].sum(axis=1)
        return (2 * votes > self.k).astype(np.int64)

    def state(self) -> dict:
        return {"X": self.X, "y": self.y, "k": self.k}

    @classmethod
    def from_state(cls, s: dict) -> "KNN":
        return cls(s["X"], s["y"], int(s["k"]))
