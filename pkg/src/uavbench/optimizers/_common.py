"""Shared helpers for the optimizer implementations."""

from __future__ import annotations

import numpy as np


def reflect_into_bounds(x: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Fold a candidate back into the box by triangular reflection."""
    span = hi - lo
    y = np.mod(x - lo, 2.0 * span)
    y = np.where(y > span, 2.0 * span - y, y)
    return lo + y


def uniform_population(rng: np.random.Generator, lo, hi, size: int) -> np.ndarray:
    return lo + rng.random((size, lo.shape[0])) * (hi - lo)


def distinct_indices(rng: np.random.Generator, n: int, forbidden: set[int]) -> int:
    """Draw one index from range(n) avoiding `forbidden` (deterministic)."""
    while True:
        r = int(rng.integers(n))
        if r not in forbidden:
            return r
