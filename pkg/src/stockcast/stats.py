"""Small numeric helpers shared by the learners."""
from __future__ import annotations

import numpy as np


def safe_std(X: np.ndarray, axis: int | None = 0) -> np.ndarray:
    """Standard deviation with constant columns mapped to 1.

    A constant column has std at rounding level rather than exactly zero, so
    the cut is relative to the column's magnitude.
    """
    X = np.asarray(X, dtype=np.float64)
    std = X.std(axis=axis)
    scale = np.maximum(1.0, np.abs(X.mean(axis=axis)))
    return np.where(std > 1e-12 * scale, std, 1.0)
