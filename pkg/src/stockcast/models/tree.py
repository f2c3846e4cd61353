"""CART trees stored as flat node arrays."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import DomainError
from ..rng import SplitMix64


def gini_impurity(class_counts) -> float:
    counts = np.asarray(class_counts, dtype=np.float64)
    if np.any(counts < 0):
        raise DomainError("class counts must be non-negative")
    total = counts.sum()
    if total <= 0:
        raise DomainError("gini impurity of an empty node is undefined")
    p = counts / total
    return float(1.0 - np.sum(p * p))


def variance_gain(parent, left, right) -> float:
    """Population variance of parent minus the size-weighted child variances."""
    parent = np.asarray(parent, dtype=np.float64)
    left = np.asarray(left, dtype=np.float64)
    right = np.asarray(right, dtype=np.float64)
    if left.size == 0 or right.size == 0:
        raise DomainError("both children must be non-empty")
    if left.size + right.size != parent.size or not np.allclose(
        np.sort(parent), np.sort(np.concatenate([left, right])), rtol=0, atol=0
    ):
        raise DomainError("children do not partition the parent")
    n = parent.size
    gain = parent.var() - (left.size * left.var() + right.size * right.var()) / n
    return float(max(gain, 0.0))


@dataclass(frozen=True, eq=False)
class Tree:
    """Node arrays; ``feature[i] == -1`` marks a leaf whose payload is ``value[i]``.

    For classification trees the payload is the weighted fraction of class 1
    in the leaf; for regression trees it is the weighted mean target.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    task: str

    @property
    def node_count(self) -> int:
        return int(self.feature.shape[0])

    @property
    def depth(self) -> int:
        depth = np.zeros(self.node_count, dtype=np.int64)
        for i in range(self.node_count):
            if self.feature[i] >= 0:
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max())

    def leaf_values(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        leaves = kernels.tree_apply(X, self.feature, self.threshold, self.left, self.right)
        return self.value[leaves]

    def predict(self, X: np.ndarray) -> np.ndarray:
        v = self.leaf_values(X)
        if self.task == "classify":
            return (v > 0.5).astype(np.int64)
        return v

    def state(self) -> dict:
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left,
            "right": self.right,
            "value": self.value,
            "task": self.task,
        }

    @classmethod
    def from_state(cls, s: dict) -> "Tree":
        return cls(s["feature"], s["threshold"], s["left"], s["right"], s["value"], s["task"])


def _node_impurity(y: np.ndarray, w: np.ndarray, task: str) -> tuple[float, float]:
    """(payload, impurity mass) comparable with best_split scores."""
    wt = float(np.sum(w))
    s = float(np.sum(w * y))
    if task == "classify":
        p = s / wt
        return p, 2.0 * s * (wt - s) / wt
    return s / wt, -(s * s / wt)


def build_tree(
    X: np.ndarray,
    y: np.ndarray,
    task: str,
    max_depth: int = 8,
    min_leaf: int = 5,
    sample_weight: np.ndarray | None = None,
    max_features: int | None = None,
    rng: SplitMix64 | None = None,
) -> Tree:
    """Grow a CART tree depth first.

    With ``max_features`` below the column count a fresh feature subset is
    drawn from ``rng`` at every node (random-forest style); subsets are sorted
    so tie-breaking always prefers the lower column index.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    n, d = X.shape
    w = np.ones(n) if sample_weight is None else np.ascontiguousarray(sample_weight, dtype=np.float64)
    code = kernels.CLASSIFY if task == "classify" else kernels.REGRESS
    k = d if max_features is None else max(1, min(int(max_features), d))
    if k < d and rng is None:
        raise ValueError("feature subsampling needs an rng")
    all_features = np.arange(d, dtype=np.int64)

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []

    def grow(idx: np.ndarray, depth: int) -> int:
        node = len(feature)
        payload, impurity = _node_impurity(y[idx], w[idx], task)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(payload)
        if depth >= max_depth or idx.size < 2 * min_leaf:
            return node
        if task == "classify" and impurity <= 0.0:
            return node
        feats = all_features if k == d else np.sort(rng.permutation(d)[:k]).astype(np.int64)
        f, t, score = kernels.best_split(X, y, w, idx, feats, code, min_leaf)
        # a split must strictly reduce impurity by more than rounding noise
        if f < 0 or not score < impurity - 1e-12 * max(1.0, abs(impurity)):
            return node
        mask = X[idx, f] <= t
        feature[node] = f
        threshold[node] = t
        left[node] = grow(idx[mask], depth + 1)
        right[node] = grow(idx[~mask], depth + 1)
        return node

    grow(np.arange(n, dtype=np.int64), 0)
    return Tree(
        np.asarray(feature, dtype=np.int64),
        np.asarray(threshold, dtype=np.float64),
        np.asarray(left, dtype=np.int64),
        np.asarray(right, dtype=np.int64),
        np.asarray(value, dtype=np.float64),
        task,
    )


def default_max_features(task: str, d: int) -> int:
    return math.ceil(math.sqrt(d)) if task == "classify" else math.ceil(d / 3)
