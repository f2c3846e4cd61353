"""Logistic regression (classification) and multivariate least squares (regression)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass(frozen=True, eq=False)
class Logistic:
    coef: np.ndarray
    intercept: float

    def decision(self, X: np.ndarray) -> np.ndarray:
        """Probability of class 1."""
        return _sigmoid(X @ self.coef + self.intercept)

    def predict(self, X: np.ndarray) -> np.ndarray:
        # strict threshold: p == 0.5 maps to 0
        return (self.decision(X) > 0.5).astype(np.int64)

    def state(self) -> dict:
        return {"coef": self.coef, "intercept": self.intercept}

    @classmethod
    def from_state(cls, s: dict) -> "Logistic":
        return cls(s["coef"], float(s["intercept"]))


def fit_logistic(X, y, hp) -> Logistic:
    """Newton-Raphson on the L2-penalized log-likelihood (intercept unpenalized)."""
    n, d = X.shape
    A = np.hstack([X, np.ones((n, 1))])
    beta = np.zeros(d + 1)
    penalty = np.full(d + 1, float(hp["l2"]))
    penalty[-1] = 0.0
    for _ in range(int(hp["max_iter"])):
        p = _sigmoid(A @ beta)
        grad = A.T @ (p - y) + penalty * beta
        H = (A * (p * (1 - p))[:, None]).T @ A + np.diag(penalty) + 1e-10 * np.eye(d + 1)
        step = np.linalg.solve(H, grad)
        beta = beta - step
        if np.max(np.abs(step)) < float(hp["tol"]):
            break
    return Logistic(beta[:-1].copy(), float(beta[-1]))


@dataclass(frozen=True, eq=False)
class LinearRegression:
    coef: np.ndarray
    intercept: float

    def predict(self, X: np.ndarray) -> np.ndarray:
        return X @ self.coef + self.intercept

    decision = predict

    def state(self) -> dict:
        return {"coef": self.coef, "intercept": self.intercept}

    @classmethod
    def from_state(cls, s: dict) -> "LinearRegression":
        return cls(s["coef"], float(s["intercept"]))


def fit_linear(X, y, hp) -> LinearRegression:
    n = X.shape[0]
    A = np.hstack([X, np.ones((n, 1))])
    beta, *_ = np.linalg.lstsq(A, y, rcond=None)
    return LinearRegression(beta[:-1].copy(), float(beta[-1]))
