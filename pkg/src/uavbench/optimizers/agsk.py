"""Gaining-sharing knowledge search with adaptive control-parameter pools.

Each generation sorts the population; every individual mixes a junior move
(exchange with its fitness neighbours and a random partner) and a senior
move (exchange with members of the best/middle/worst bands). The fraction
of junior dimensions decays with budget progress. A pool of four
(knowledge-factor, knowledge-ratio) settings is sampled per individual with
probabilities adapted from the fitness improvement each setting produced.
Population size shrinks linearly over the budget.
"""

from __future__ import annotations

import numpy as np

from ._common import reflect_into_bounds, uniform_population

_POOL = np.array([[0.1, 0.2], [1.0, 0.1], [0.5, 0.9], [1.0, 0.9]])
_MIN_PROB = 0.05


def min_budget(dim: int, hyper: dict) -> int:
    n_init = hyper.get("n_init")
    return int(n_init) if n_init is not None else 20 * dim


def agsk(
    handle,
    rng,
    should_stop,
    n_init: int | None = None,
    n_min: int = 12,
    knowledge_rate: float = 10.0,
    p_frac: float = 0.1,
    on_generation=None,
):
    n = handle.arity
    lo, hi = handle.lo, handle.hi
    if n_init is None:
        n_init = 20 * n
    budget = handle.budget

    pop = uniform_population(rng, lo, hi, n_init)
    fit = np.array([handle.evaluate(x) for x in pop])
    pop_size = n_init
    probs = np.full(len(_POOL), 1.0 / len(_POOL))

    while handle.remaining > 0 and not should_stop():
        progress = handle.evals_used / budget
        junior_ratio = (1.0 - progress) ** knowledge_rate

        order = np.argsort(fit, kind="stable")
        rank_of = np.empty(pop_size, dtype=int)
        rank_of[order] = np.arange(pop_size)
        better = pop[order[np.maximum(rank_of - 1, 0)]]
        worse = pop[order[np.minimum(rank_of + 1, pop_size - 1)]]

        p_num = max(1, int(np.ceil(p_frac * pop_size)))
        best_band = order[:p_num]
        worst_band = order[pop_size - p_num :]
        middle_band = order[p_num : pop_size - p_num]
        if len(middle_band) == 0:
            middle_band = order

        setting = rng.choice(len(_POOL), size=pop_size, p=probs)
        kf = _POOL[setting, 0][:, None]
        kr = _POOL[setting, 1][:, None]

        junior_mask = rng.random((pop_size, n)) <= junior_ratio
        kr_mask = rng.random((pop_size, n)) <= kr

        partner = rng.integers(pop_size, size=pop_size)
        for i in range(pop_size):
            while partner[i] == i:
                partner[i] = rng.integers(pop_size)
        pb = pop[best_band[rng.integers(len(best_band), size=pop_size)]]
        pm_idx = middle_band[rng.integers(len(middle_band), size=pop_size)]
        pw = pop[worst_band[rng.integers(len(worst_band), size=pop_size)]]

        partner_better = (fit[partner] < fit)[:, None]
        junior_step = np.where(
            partner_better,
            better - worse + pop[partner] - pop,
            better - worse + pop - pop[partner],
        )
        middle_better = (fit[pm_idx] < fit)[:, None]
        pm = pop[pm_idx]
        senior_step = np.where(middle_better, pb - pw + pm - pop, pb - pw + pop - pm)

        step = np.where(junior_mask, junior_step, senior_step)
        trials = np.where(kr_mask, pop + kf * step, pop)
        trials = reflect_into_bounds(trials, lo, hi)

        gains = np.zeros(len(_POOL))
        for i in range(pop_size):
            if handle.remaining <= 0 or should_stop():
                break
            f_trial = handle.evaluate(trials[i])
            if f_trial < fit[i]:
                gains[setting[i]] += fit[i] - f_trial
                pop[i] = trials[i]
                fit[i] = f_trial

        total_gain = gains.sum()
        if total_gain > 0.0:
            shares = gains / total_gain
            probs = np.maximum(_MIN_PROB, 0.5 * probs + 0.5 * shares)
            probs = probs / probs.sum()

        target = max(n_min, min(pop_size, round(n_init + (n_min - n_init) * handle.evals_used / budget)))
        if target < pop_size:
            keep = np.argsort(fit, kind="stable")[:target]
            keep.sort()
            pop = pop[keep]
            fit = fit[keep]
            pop_size = target
        if on_generation is not None:
            on_generation(handle.evals_used, pop_size)
