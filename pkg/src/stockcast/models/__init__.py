"""The shallow classification and regression learners."""
from .base import (
    CLASSIFIERS,
    DEFAULTS,
    REGRESSORS,
    ModelSpec,
    Standardizer,
    TrainedModel,
    decision_function,
    fit,
    predict,
)
from .ensembles import adaboost_stage_weight
from .tree import gini_impurity, variance_gain

__all__ = [
    "CLASSIFIERS",
    "DEFAULTS",
    "REGRESSORS",
    "ModelSpec",
    "Standardizer",
    "TrainedModel",
    "adaboost_stage_weight",
    "decision_function",
    "fit",
    "gini_impurity",
    "predict",
    "variance_gain",
]
