"""Shared fit/predict contract for the shallow learners."""
from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from ..errors import DegenerateTargetError, InsufficientDataError, ShapeError
from ..rng import SplitMix64
from ..stats import safe_std
from . import ann, ensembles, knn, linear, svm
from .tree import build_tree

CLASSIFIERS = ("logistic", "knn", "cart", "bagging", "adaboost", "random_forest", "ann", "svm")
REGRESSORS = ("multivariate_linear", "cart", "bagging", "adaboost", "random_forest", "ann", "svm")

_TREE = {"max_depth": 8, "min_leaf": 5}
DEFAULTS: dict[tuple[str, str], dict] = {
    ("logistic", "classify"): {"l2": 1e-4, "max_iter": 100, "tol": 1e-10},
    ("knn", "classify"): {"k": 5},
    ("cart", "classify"): dict(_TREE),
    ("cart", "regress"): dict(_TREE),
    ("bagging", "classify"): {"n_trees": 100, "bootstrap": True, **_TREE},
    ("bagging", "regress"): {"n_trees": 100, "bootstrap": True, **_TREE},
    ("random_forest", "classify"): {"n_trees": 100, "bootstrap": True, "max_features": None, **_TREE},
    ("random_forest", "regress"): {"n_trees": 100, "bootstrap": True, "max_features": None, **_TREE},
    ("adaboost", "classify"): {"n_rounds": 200, "max_depth": 3, "max_retries": 10},
    ("adaboost", "regress"): {"n_rounds": 200, "max_depth": 3, "min_leaf": 5, "learning_rate": 0.1},
    ("ann", "classify"): {"hidden": 16, "learning_rate": 0.01, "iterations": 2000},
    ("ann", "regress"): {"hidden": 16, "learning_rate": 0.01, "iterations": 2000},
    ("svm", "classify"): {"C": 1.0, "gamma": None, "tol": 1e-3, "max_epochs": 1000},
    ("svm", "regress"): {"C": 1.0, "gamma": None, "epsilon": 0.1, "tol": 1e-3, "max_epochs": 1000},
    ("multivariate_linear", "regress"): {},
}


@dataclass(frozen=True)
class ModelSpec:
    algo: str
    task: str
    hyperparameters: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))
    seed: int = 0

    def __post_init__(self):
        if (self.algo, self.task) not in DEFAULTS:
            raise ValueError(f"{self.algo}/{self.task} is not a supported model")
        hp = dict(self.hyperparameters)
        unknown = set(hp) - set(DEFAULTS[(self.algo, self.task)])
        if unknown:
            raise ValueError(f"unknown hyperparameters for {self.algo}/{self.task}: {sorted(unknown)}")
        object.__setattr__(self, "hyperparameters", MappingProxyType(hp))
        object.__setattr__(self, "seed", int(self.seed) & ((1 << 64) - 1))

    def __hash__(self):
        return hash((self.algo, self.task, tuple(sorted(self.hyperparameters.items())), self.seed))

    def __eq__(self, other):
        return (
            isinstance(other, ModelSpec)
            and (self.algo, self.task, self.seed) == (other.algo, other.task, other.seed)
            and dict(self.hyperparameters) == dict(other.hyperparameters)
        )

    def resolved(self) -> dict:
        hp = dict(DEFAULTS[(self.algo, self.task)])
        hp.update(self.hyperparameters)
        return hp

    def to_dict(self) -> dict:
        return {"algo": self.algo, "task": self.task, "hyperparameters": dict(self.hyperparameters), "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        return cls(d["algo"], d["task"], MappingProxyType(dict(d.get("hyperparameters", {}))), int(d.get("seed", 0)))


@dataclass(frozen=True, eq=False)
class Standardizer:
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray) -> "Standardizer":
        return cls(X.mean(axis=0), safe_std(X))

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean) / self.std

    def inverse(self, Z: np.ndarray) -> np.ndarray:
        return Z * self.std + self.mean


@dataclass(frozen=True, eq=False)
class TrainedModel:
    spec: ModelSpec
    params: object
    scaler: Standardizer
    n_features: int

    @property
    def task(self) -> str:
        return self.spec.task


def _check_inputs(X, y=None) -> tuple[np.ndarray, np.ndarray | None]:
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ShapeError("inputs must be a 2-D row matrix")
    if not np.all(np.isfinite(X)):
        raise ValueError("inputs contain non-finite values")
    if y is not None:
        y = np.asarray(y, dtype=np.float64)
        if y.shape != (X.shape[0],):
            raise ShapeError("targets must have one value per input row")
        if not np.all(np.isfinite(y)):
            raise ValueError("targets contain non-finite values")
    return X, y


def fit(spec: ModelSpec, inputs, targets) -> TrainedModel:
    X, y = _check_inputs(inputs, targets)
    n = X.shape[0]
    if n < 10:
        raise InsufficientDataError(f"need at least 10 training rows, got {n}")
    hp = spec.resolved()
    if spec.task == "classify":
        if not np.isin(y, (0.0, 1.0)).all():
            raise ValueError("classification targets must be 0/1")
        if np.unique(y).size < 2:
            raise DegenerateTargetError("classification target has a single class")
    scaler = Standardizer.fit(X)
    Z = scaler.transform(X)
    rng = SplitMix64(spec.seed)
    algo, task = spec.algo, spec.task

    if algo == "logistic":
        params = linear.fit_logistic(Z, y, hp)
    elif algo == "multivariate_linear":
        params = linear.fit_linear(Z, y, hp)
    elif algo == "knn":
        k = int(hp["k"])
        if n < k:
            raise InsufficientDataError(f"knn needs at least k={k} rows, got {n}")
        params = knn.KNN(Z, y.astype(np.int64), k)
    elif algo == "cart":
        params = build_tree(Z, y, task, max_depth=int(hp["max_depth"]), min_leaf=int(hp["min_leaf"]))
    elif algo == "bagging":
        params = ensembles.fit_forest(Z, y, task, hp, rng, random_features=False)
    elif algo == "random_forest":
        params = ensembles.fit_forest(Z, y, task, hp, rng, random_features=True)
    elif algo == "adaboost":
        if task == "classify":
            params = ensembles.fit_adaboost(Z, y, hp, rng)
        else:
            params = ensembles.fit_gradient_boosting(Z, y, hp)
    elif algo == "ann":
        params = ann.fit_mlp(Z, y, task, hp, rng)
    elif algo == "svm":
        params = svm.fit_svm(Z, y, task, hp)
    else:  # pragma: no cover - guarded by ModelSpec
        raise ValueError(algo)
    return TrainedModel(spec, params, scaler, X.shape[1])


def _prepare(model: TrainedModel, inputs) -> np.ndarray:
    X, _ = _check_inputs(inputs)
    if X.shape[1] != model.n_features:
        raise ShapeError(f"model expects {model.n_features} features, got {X.shape[1]}")
    return np.ascontiguousarray(model.scaler.transform(X))


def predict(model: TrainedModel, inputs) -> np.ndarray:
    """0/1 labels for classifiers, finite values for regressors."""
    out = model.params.predict(_prepare(model, inputs))
    if model.task == "classify":
        return np.asarray(out, dtype=np.int64)
    return np.asarray(out, dtype=np.float64)


def decision_function(model: TrainedModel, inputs) -> np.ndarray:
    """Continuous score behind each prediction (probability, margin or vote share)."""
    Z = _prepare(model, inputs)
    params = model.params
    if hasattr(params, "decision"):
        return np.asarray(params.decision(Z), dtype=np.float64)
    return np.asarray(params.leaf_values(Z), dtype=np.float64)
