"""Backend selection for the hot loops.

The compiled ``_ckernels`` module is used when it was built; otherwise, or when
``STOCKCAST_PURE_PYTHON=1`` is set, the numpy versions in ``_pykernels`` are.
"""
from __future__ import annotations

import importlib
import os

from . import _pykernels

CLASSIFY = _pykernels.CLASSIFY
REGRESS = _pykernels.REGRESS


def load_backend(name: str):
    if name == "python":
        return _pykernels
    if name == "cython":
        return importlib.import_module("stockcast._ckernels")
    raise ValueError(f"unknown kernel backend {name!r}")


def available_backends() -> list[str]:
    names = ["python"]
    try:
        load_backend("cython")
    except ImportError:
        pass
    else:
        names.insert(0, "cython")
    return names


if os.environ.get("STOCKCAST_PURE_PYTHON"):
    BACKEND = "python"
else:
    BACKEND = available_backends()[0]

_impl = load_backend(BACKEND)
best_split = _impl.best_split
tree_apply = _impl.tree_apply
svc_dual_cd = _impl.svc_dual_cd
svr_dual_cd = _impl.svr_dual_cd
