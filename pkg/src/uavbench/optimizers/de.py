"""Classic differential evolution, rand/1/bin with reflection at bounds."""

from __future__ import annotations

import numpy as np

from ._common import reflect_into_bounds, uniform_population


def min_budget(dim: int, hyper: dict) -> int:
    return int(hyper.get("pop_size", 50))


def de(
    handle,
    rng,
    should_stop,
    pop_size: int = 50,
    f_weight: float = 0.5,
    cr: float = 0.5,
):
    n = handle.arity
    lo, hi = handle.lo, handle.hi

    pop = uniform_population(rng, lo, hi, pop_size)
    fit = np.array([handle.evaluate(x) for x in pop])

    while handle.remaining > 0 and not should_stop():
        # donors drawn against the generation's starting population
        r = rng.integers(pop_size, size=(pop_size, 3))
        for i in range(pop_size):
            while r[i, 0] == i or r[i, 1] in (i, r[i, 0]) or r[i, 2] in (i, r[i, 0], r[i, 1]):
                r[i] = rng.integers(pop_size, size=3)
        jrand = rng.integers(n, size=pop_size)
        cross = rng.random((pop_size, n)) < cr
        cross[np.arange(pop_size), jrand] = True

        mutants = pop[r[:, 0]] + f_weight * (pop[r[:, 1]] - pop[r[:, 2]])
        mutants = reflect_into_bounds(mutants, lo, hi)
        trials = np.where(cross, mutants, pop)

        for i in range(pop_size):
            if handle.remaining <= 0 or should_stop():
                return
            f_trial = handle.evaluate(trials[i])
            if f_trial < fit[i]:  # ties keep the earlier individual
                pop[i] = trials[i]
                fit[i] = f_trial
