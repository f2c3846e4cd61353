"""Bagging, random forests, AdaBoost (classification) and least-squares boosting."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError
from ..rng import SplitMix64
from .tree import Tree, build_tree, default_max_features

ALPHA_CAP = 0.5 * math.log(1e6)


def adaboost_stage_weight(weighted_error: float) -> float:
    """Stage weight 0.5*ln((1-e)/e); a perfect learner gets the capped weight."""
    e = float(weighted_error)
    if e <= 0.0:
        return ALPHA_CAP
    if e >= 1.0:
        raise DomainError("weighted error must be below 1")
    return min(0.5 * math.log((1.0 - e) / e), ALPHA_CAP)


def vote(member_predictions: np.ndarray) -> np.ndarray:
    """Majority vote over rows of 0/1 predictions; ties go to 0."""
    ones = member_predictions.sum(axis=0)
    return (2 * ones > member_predictions.shape[0]).astype(np.int64)


@dataclass(frozen=True, eq=False)
class Forest:
    """Bagging and random forests share this container."""

    trees: tuple[Tree, ...]
    task: str

    def member_predictions(self, X: np.ndarray) -> np.ndarray:
        return np.stack([t.predict(X) for t in self.trees])

    def decision(self, X: np.ndarray) -> np.ndarray:
        m = self.member_predictions(X)
        return m.mean(axis=0)

    def predict(self, X: np.ndarray) -> np.ndarray:
        m = self.member_predictions(X)
        if self.task == "classify":
            return vote(m)
        return m.mean(axis=0)

    def state(self) -> dict:
        return {"task": self.task, "trees": [t.state() for t in self.trees]}

    @classmethod
    def from_state(cls, s: dict) -> "Forest":
        return cls(tuple(Tree.from_state(t) for t in s["trees"]), s["task"])


def fit_forest(X, y, task, hp, rng: SplitMix64, random_features: bool) -> Forest:
    n, d = X.shape
    if random_features:
        mf = hp.get("max_features") or default_max_features(task, d)
    else:
        mf = d
    trees = []
    for m in range(int(hp["n_trees"])):
        # each member owns a stream keyed by its index, so order of training is irrelevant
        stream = rng.child(m)
        if hp.get("bootstrap", True):
            idx = stream.integers(n, n)
        else:
            idx = np.arange(n)
        trees.append(
            build_tree(
                X[idx],
                y[idx],
                task,
                max_depth=int(hp["max_depth"]),
                min_leaf=int(hp["min_leaf"]),
                max_features=mf,
                rng=stream,
            )
        )
    return Forest(tuple(trees), task)


@dataclass(frozen=True, eq=False)
class AdaBoost:
    """Discrete AdaBoost over decision stumps with labels mapped to +-1."""

    stumps: tuple[Tree, ...]
    alphas: np.ndarray
    errors: np.ndarray = field(default_factory=lambda: np.zeros(0))
    normalizers: np.ndarray = field(default_factory=lambda: np.zeros(0))
    exp_loss: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def decision(self, X: np.ndarray) -> np.ndarray:
        score = np.zeros(X.shape[0])
        for a, s in zip(self.alphas, self.stumps):
            score += a * (2.0 * s.predict(X) - 1.0)
        return score

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.decision(X) > 0).astype(np.int64)

    def state(self) -> dict:
        return {
            "stumps": [s.state() for s in self.stumps],
            "alphas": self.alphas,
            "errors": self.errors,
            "normalizers": self.normalizers,
            "exp_loss": self.exp_loss,
        }

    @classmethod
    def from_state(cls, s: dict) -> "AdaBoost":
        return cls(tuple(Tree.from_state(t) for t in s["stumps"]), s["alphas"], s["errors"], s["normalizers"], s["exp_loss"])


def fit_adaboost(X, y, hp, rng: SplitMix64) -> AdaBoost:
    n = X.shape[0]
    ys = 2.0 * y - 1.0
    w = np.full(n, 1.0 / n)
    depth = int(hp.get("max_depth", 1))
    max_retries = int(hp.get("max_retries", 10))
    stumps, alphas, errors, zs, losses = [], [], [], [], []
    loss = 1.0  # mean exp(-y F) at F = 0
    for t in range(int(hp["n_rounds"])):
        stump = build_tree(X, y, "classify", max_depth=depth, min_leaf=1, sample_weight=w)
        miss = stump.predict(X) != y
        err = float(np.sum(w[miss]))
        retries = 0
        stream = rng.child(t)
        while err >= 0.5 and retries < max_retries:
            # weighted learner failed: refit on a reshuffled weighted resample
            idx = stream.choice_weighted(w, n)
            stump = build_tree(X[idx], y[idx], "classify", max_depth=depth, min_leaf=1)
            miss = stump.predict(X) != y
            err = float(np.sum(w[miss]))
            retries += 1
        if err >= 0.5:
            break
        alpha = adaboost_stage_weight(err)
        h = 2.0 * stump.predict(X) - 1.0
        w = w * np.exp(-alpha * ys * h)
        z = float(w.sum())
        w /= z
        loss *= z
        stumps.append(stump)
        alphas.append(alpha)
        errors.append(err)
        zs.append(z)
        losses.append(loss)
        if err <= 0.0:
            break
    return AdaBoost(tuple(stumps), np.asarray(alphas), np.asarray(errors), np.asarray(zs), np.asarray(losses))


@dataclass(frozen=True, eq=False)
class GradientBoosting:
    """Least-squares boosting: each tree fits the current residuals."""

    init: float
    learning_rate: float
    trees: tuple[Tree, ...]

    def predict(self, X: np.ndarray) -> np.ndarray:
        out = np.full(X.shape[0], self.init)
        for t in self.trees:
            out += self.learning_rate * t.predict(X)
        return out

    decision = predict

    def state(self) -> dict:
        return {"init": self.init, "learning_rate": self.learning_rate, "trees": [t.state() for t in self.trees]}

    @classmethod
    def from_state(cls, s: dict) -> "GradientBoosting":
        return cls(float(s["init"]), float(s["learning_rate"]), tuple(Tree.from_state(t) for t in s["trees"]))


def fit_gradient_boosting(X, y, hp) -> GradientBoosting:
    init = float(np.mean(y))
    lr = float(hp["learning_rate"])
    pred = np.full(y.shape[0], init)
    trees = []
    for _ in range(int(hp["n_rounds"])):
        tree = build_tree(X, y - pred, "regress", max_depth=int(hp["max_depth"]), min_leaf=int(hp["min_leaf"]))
        pred = pred + lr * tree.predict(X)
        trees.append(tree)
    return GradientBoosting(init, lr, tuple(trees))
