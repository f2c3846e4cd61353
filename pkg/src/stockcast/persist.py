"""Versioned, self-describing model container.

A saved model is one JSON document::

    {"format": "stockcast-model", "version": 1, "kind": ..., "spec": {...},
     "params_type": ..., "state": ..., "header": ...}

``header`` is the free-text provenance line (tool version, seed, config hash)
that the command line stamps on every output; it is not read back.

Arrays inside ``state`` are encoded as ``{"__ndarray__": dtype, "shape": [...],
"data": base64 of little-endian bytes}`` so a load reproduces every bit.
Python floats go through ``repr`` via json, which also round-trips exactly.
"""
from __future__ import annotations

import base64
import json

import numpy as np

FORMAT = "stockcast-model"
VERSION = 1


def encode(obj):
    if isinstance(obj, np.ndarray):
        arr = np.ascontiguousarray(obj)
        le = arr.astype(arr.dtype.newbyteorder("<"), copy=False)
        return {"__ndarray__": le.dtype.str, "shape": list(arr.shape), "data": base64.b64encode(le.tobytes()).decode("ascii")}
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def decode(obj):
    if isinstance(obj, dict):
        if "__ndarray__" in obj:
            raw = base64.b64decode(obj["data"])
            arr = np.frombuffer(raw, dtype=np.dtype(obj["__ndarray__"])).reshape(obj["shape"])
            return arr.astype(arr.dtype.newbyteorder("="), copy=True)
        return {k: decode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [decode(v) for v in obj]
    return obj


def dumps(kind: str, spec: dict, params_type: str, state: dict, header: str | None = None) -> str:
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "kind": kind,
        "spec": encode(spec),
        "params_type": params_type,
        "state": encode(state),
    }
    if header:
        doc["header"] = header
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def loads(text: str) -> dict:
    doc = json.loads(text)
    if doc.get("format") != FORMAT:
        raise ValueError("not a stockcast model file")
    if doc.get("version") != VERSION:
        raise ValueError(f"unsupported model file version {doc.get('version')}")
    doc["spec"] = decode(doc["spec"])
    doc["state"] = decode(doc["state"])
    return doc


def _shallow_types():
    from .models import ann, ensembles, knn, linear, svm, tree

    return {
        cls.__name__: cls
        for cls in (
            linear.Logistic,
            linear.LinearRegression,
            knn.KNN,
            tree.Tree,
            ensembles.Forest,
            ensembles.AdaBoost,
            ensembles.GradientBoosting,
            ann.MLP,
            svm.SVM,
        )
    }


def save_model(model, path) -> None:
    """Write any trained model (shallow, LSTM or SOFNN) to ``path``."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(model_to_text(model))


def model_to_text(model, header: str | None = None) -> str:
    from .lstm import LstmModel
    from .models.base import TrainedModel
    from .sofnn import SofnnModel

    if isinstance(model, TrainedModel):
        state = {
            "params": model.params.state(),
            "scaler_mean": model.scaler.mean,
            "scaler_std": model.scaler.std,
            "n_features": model.n_features,
        }
        return dumps("shallow", model.spec.to_dict(), type(model.params).__name__, state, header)
    if isinstance(model, LstmModel):
        return dumps("lstm", model.config_dict(), "LstmModel", model.state(), header)
    if isinstance(model, SofnnModel):
        return dumps("sofnn", model.config_dict(), "SofnnModel", model.state(), header)
    raise TypeError(f"cannot serialize {type(model).__name__}")


def model_from_text(text: str):
    from .lstm import LstmModel
    from .models.base import ModelSpec, Standardizer, TrainedModel
    from .sofnn import SofnnModel

    doc = loads(text)
    kind, state = doc["kind"], doc["state"]
    if kind == "shallow":
        cls = _shallow_types()[doc["params_type"]]
        return TrainedModel(
            ModelSpec.from_dict(doc["spec"]),
            cls.from_state(state["params"]),
            Standardizer(state["scaler_mean"], state["scaler_std"]),
            int(state["n_features"]),
        )
    if kind == "lstm":
        return LstmModel.from_state(doc["spec"], state)
    if kind == "sofnn":
        return SofnnModel.from_state(doc["spec"], state)
    raise ValueError(f"unknown model kind {kind!r}")


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return model_from_text(fh.read())
