"""Restarted Nelder-Mead simplex search.

The first descent starts from the box center, so the search is
seed-independent until the simplex collapses; every restart then begins
from a seeded uniform random point and runs until the budget is gone.
"""

from __future__ import annotations

import numpy as np


class _OutOfBudget(Exception):
    pass


def min_budget(dim: int, hyper: dict) -> int:
    return dim + 2


def nelder_mead_restart(
    handle,
    rng,
    should_stop,
    step_frac: float = 0.05,
    collapse_tol: float = 1e-8,
    alpha: float = 1.0,
    gamma: float = 2.0,
    rho: float = 0.5,
    sigma: float = 0.5,
):
    lo, hi = handle.lo, handle.hi
    n = handle.arity
    span = hi - lo
    range_norm = float(np.linalg.norm(span))

    def ev(x):
        # always evaluate at least once so the run has a valid incumbent
        if handle.remaining <= 0 or (should_stop() and handle.evals_used > 0):
            raise _OutOfBudget
        return handle.evaluate(x)

    def clamp(x):
        return np.minimum(hi, np.maximum(lo, x))

    def run_once(x0):
        simplex = [clamp(x0)]
        for i in range(n):
            step = step_frac * span[i]
            point = x0.copy()
            if point[i] + step > hi[i]:
                step = -step
            point[i] += step
            simplex.append(clamp(point))
        simplex = np.array(simplex)
        values = np.array([ev(p) for p in simplex])

        while True:
            order = np.argsort(values, kind="stable")
            simplex = simplex[order]
            values = values[order]
            if np.max(np.linalg.norm(simplex[1:] - simplex[0], axis=1)) < collapse_tol * range_norm:
                return  # collapsed; caller restarts

            centroid = simplex[:-1].mean(axis=0)
            reflected = clamp(centroid + alpha * (centroid - simplex[-1]))
            f_r = ev(reflected)
            if f_r < values[0]:
                expanded = clamp(centroid + gamma * (reflected - centroid))
                f_e = ev(expanded)
                if f_e < f_r:
                    simplex[-1], values[-1] = expanded, f_e
                else:
                    simplex[-1], values[-1] = reflected, f_r
            elif f_r < values[-2]:
                simplex[-1], values[-1] = reflected, f_r
            else:
                if f_r < values[-1]:  # outside contraction
                    contracted = clamp(centroid + rho * (reflected - centroid))
                else:  # inside contraction
                    contracted = clamp(centroid + rho * (simplex[-1] - centroid))
                f_c = ev(contracted)
                if f_c < min(f_r, values[-1]):
                    simplex[-1], values[-1] = contracted, f_c
                else:  # shrink toward the best vertex
                    for i in range(1, n + 1):
                        simplex[i] = clamp(simplex[0] + sigma * (simplex[i] - simplex[0]))
                        values[i] = ev(simplex[i])

    start = 0.5 * (lo + hi)
    try:
        while handle.remaining > 0 and not should_stop():
            run_once(start)
            start = lo + rng.random(n) * span
    except _OutOfBudget:
        pass
