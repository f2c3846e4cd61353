"""RBF-kernel support vector classification and epsilon-insensitive regression.

Both are trained by dual coordinate ascent.  The bias is folded into the kernel
(K + 1), which keeps the dual free of the equality constraint.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels


def rbf_kernel(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    d2 = np.sum(A * A, axis=1)[:, None] - 2.0 * A @ B.T + np.sum(B * B, axis=1)[None, :]
    return np.exp(-gamma * np.maximum(d2, 0.0))


@dataclass(frozen=True, eq=False)
class SVM:
    support: np.ndarray  # training rows with nonzero dual weight
    coef: np.ndarray  # alpha_i * y_i (classify) or beta_i (regress)
    gamma: float
    task: str
    epochs: int = 0
    violation: float = 0.0

    def decision(self, X: np.ndarray) -> np.ndarray:
        if self.coef.size == 0:
            return np.zeros(X.shape[0])
        K = rbf_kernel(X, self.support, self.gamma) + 1.0
        return K @ self.coef

    def predict(self, X: np.ndarray) -> np.ndarray:
        f = self.decision(X)
        if self.task == "classify":
            return (f > 0).astype(np.int64)
        return f

    def state(self) -> dict:
        return {
            "support": self.support,
            "coef": self.coef,
            "gamma": self.gamma,
            "task": self.task,
            "epochs": self.epochs,
            "violation": self.violation,
        }

    @classmethod
    def from_state(cls, s: dict) -> "SVM":
        return cls(s["support"], s["coef"], float(s["gamma"]), s["task"], int(s["epochs"]), float(s["violation"]))


def fit_svm(X, y, task, hp) -> SVM:
    d = X.shape[1]
    gamma = float(hp.get("gamma") or 1.0 / d)
    K = np.ascontiguousarray(rbf_kernel(X, X, gamma) + 1.0)
    C = float(hp["C"])
    if task == "classify":
        ys = np.ascontiguousarray(2.0 * y - 1.0)
        alpha, epochs, viol = kernels.svc_dual_cd(K, ys, C, float(hp["tol"]), int(hp["max_epochs"]))
        coef = alpha * ys
        keep = alpha > 0
    else:
        beta, epochs, viol = kernels.svr_dual_cd(
            K, np.ascontiguousarray(y, dtype=np.float64), C, float(hp["epsilon"]), float(hp["tol"]), int(hp["max_epochs"])
        )
        coef = beta
        keep = beta != 0
    return SVM(X[keep].copy(), coef[keep].copy(), gamma, task, int(epochs), float(viol))
