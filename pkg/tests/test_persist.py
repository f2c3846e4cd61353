import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from stockcast import persist
from stockcast.lstm import TrainConfig, train_lstm
from stockcast.models.base import CLASSIFIERS, REGRESSORS, fit, predict
from stockcast.sofnn import SofnnConfig, fit_sofnn

from conftest import synthetic_frame
from test_models import blobs, fast_spec

SHALLOW = [(a, "classify") for a in CLASSIFIERS] + [(a, "regress") for a in REGRESSORS]


@pytest.mark.parametrize("algo,task", SHALLOW)
def test_shallow_round_trip(algo, task, tmp_path):
    X, y = blobs(task=task, seed=3)
    model = fit(fast_spec(algo, task, seed=5), X, y)
    path = tmp_path / "m.json"
    persist.save_model(model, path)
    back = persist.load_model(path)
    assert back.spec == model.spec
    assert predict(back, X).tobytes() == predict(model, X).tobytes()
    # saving the loaded model reproduces the file exactly
    assert persist.model_to_text(back) == path.read_text(encoding="utf-8")


def test_lstm_round_trip(tmp_path):
    frame = synthetic_frame(60, seed=2)
    model, _ = train_lstm(TrainConfig(epochs=3, hidden=4, seed=1), frame)
    path = tmp_path / "lstm.json"
    persist.save_model(model, path)
    back = persist.load_model(path)
    windows = _windows(frame)
    a = model.predict_windows(frame, windows, "contemporaneous")
    b = back.predict_windows(frame, windows, "contemporaneous")
    assert all((x is None and y is None) or x.tobytes() == y.tobytes() for x, y in zip(a, b))
    assert back.loss_curve == model.loss_curve
    assert back.config == model.config


def test_sofnn_round_trip(tmp_path):
    g = np.random.default_rng(0)
    X = g.uniform(0, 3, (80, 3))
    y = np.sin(X[:, 0]) + X[:, 2]
    model = fit_sofnn(SofnnConfig(delta=0.1, epochs=4), X, y)
    path = tmp_path / "sofnn.json"
    persist.save_model(model, path)
    back = persist.load_model(path)
    assert back.n_neurons == model.n_neurons
    assert back.config == model.config
    assert back.predict(X).tobytes() == model.predict(X).tobytes()


def _windows(frame):
    from stockcast.harness import ForecastWindow

    return [ForecastWindow(a, tuple(range(a + 1, a + 6))) for a in range(4, len(frame) - 6, 5)]


@given(hnp.arrays(st.sampled_from([np.float64, np.int64, np.float32]), hnp.array_shapes(max_dims=3, max_side=5)))
def test_array_codec_is_bit_exact(arr):
    back = persist.decode(json.loads(json.dumps(persist.encode(arr))))
    assert back.dtype == arr.dtype and back.shape == arr.shape
    assert back.tobytes() == arr.tobytes()


def test_rejects_foreign_documents():
    with pytest.raises(ValueError):
        persist.loads(json.dumps({"format": "other"}))
    with pytest.raises(ValueError):
        persist.loads(json.dumps({"format": persist.FORMAT, "version": 99}))
    with pytest.raises(TypeError):
        persist.model_to_text(object())
