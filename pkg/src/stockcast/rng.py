"""Seeded SplitMix64 stream used for every random draw in the package.

The generator is counter based: output ``k`` of a stream seeded with ``s`` is
``mix(s + (k + 1) * GAMMA)`` where ``mix`` is the SplitMix64 finalizer.  That
makes bulk draws vectorizable and lets child streams be derived from
``(seed, index)`` so parallel ensemble members reproduce sequential results.
"""
from __future__ import annotations

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
MASK64 = (1 << 64) - 1

_GAMMA_U = np.uint64(GAMMA)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def splitmix64(state: int) -> tuple[int, int]:
    """Scalar reference step: returns (new_state, output)."""
    state = (state + GAMMA) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


class SplitMix64:
    """Deterministic 64-bit stream.  Not thread safe; derive children instead."""

    def __init__(self, seed: int):
        self.seed = int(seed) & MASK64
        self._counter = 0

    def child(self, index: int) -> "SplitMix64":
        """Independent stream keyed by (seed, index)."""
        _, out = splitmix64((self.seed ^ ((int(index) * 0xD1B54A32D192ED03) & MASK64)) & MASK64)
        return SplitMix64(out)

    def next_u64(self, n: int) -> np.ndarray:
        k = np.arange(self._counter + 1, self._counter + n + 1, dtype=np.uint64)
        self._counter += n
        with np.errstate(over="ignore"):
            z = np.uint64(self.seed) + k * _GAMMA_U
            return _mix(z)

    def random(self, n: int) -> np.ndarray:
        """Uniform doubles in [0, 1) with 53 bits of precision."""
        return (self.next_u64(n) >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)

    def uniform(self, low: float, high: float, size) -> np.ndarray:
        shape = (size,) if np.isscalar(size) else tuple(size)
        n = int(np.prod(shape))
        return (low + (high - low) * self.random(n)).reshape(shape)

    def integers(self, high: int, n: int) -> np.ndarray:
        """Integers in [0, high)."""
        return np.minimum((self.random(n) * high).astype(np.int64), high - 1)

    def normal(self, size) -> np.ndarray:
        shape = (size,) if np.isscalar(size) else tuple(size)
        n = int(np.prod(shape))
        m = (n + 1) // 2
        u1 = 1.0 - self.random(m)
        u2 = self.random(m)
        r = np.sqrt(-2.0 * np.log(u1))
        z = np.concatenate([r * np.cos(2 * np.pi * u2), r * np.sin(2 * np.pi * u2)])
        return z[:n].reshape(shape)

    def permutation(self, n: int) -> np.ndarray:
        return np.argsort(self.random(n), kind="stable")

    def choice_weighted(self, weights: np.ndarray, n: int) -> np.ndarray:
        """Draw n indices with probability proportional to weights."""
        cdf = np.cumsum(weights, dtype=np.float64)
        cdf /= cdf[-1]
        idx = np.searchsorted(cdf, self.random(n), side="right")
        return np.minimum(idx, len(weights) - 1)
