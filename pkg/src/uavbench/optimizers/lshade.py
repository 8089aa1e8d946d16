"""Success-history adaptive differential evolution with linear population
size reduction: current-to-pbest/1 mutation against an external archive,
per-slot F/CR memories updated by weighted Lehmer means, and a population
that shrinks linearly from n_init down to n_min over the budget.
"""

from __future__ import annotations

import numpy as np

from ._common import reflect_into_bounds, uniform_population


def min_budget(dim: int, hyper: dict) -> int:
    n_init = hyper.get("n_init")
    return int(n_init) if n_init is not None else 18 * dim


def lpsr_target(n_init: int, n_min: int, used: int, budget: int) -> int:
    """Population size the linear reduction schedule prescribes at `used`."""
    return max(n_min, min(n_init, round(n_init + (n_min - n_init) * used / budget)))


def lshade(
    handle,
    rng,
    should_stop,
    n_init: int | None = None,
    n_min: int = 4,
    memory_size: int = 6,
    p_best: float = 0.11,
    archive_rate: float = 2.6,
    on_generation=None,
):
    n = handle.arity
    lo, hi = handle.lo, handle.hi
    if n_init is None:
        n_init = 18 * n
    budget = handle.budget

    pop = uniform_population(rng, lo, hi, n_init)
    fit = np.array([handle.evaluate(x) for x in pop])
    pop_size = n_init

    m_f = np.full(memory_size, 0.5)
    m_cr = np.full(memory_size, 0.5)  # NaN marks the terminal CR state
    mem_pos = 0
    archive: list[np.ndarray] = []

    while handle.remaining > 0 and not should_stop():
        mem_idx = rng.integers(memory_size, size=pop_size)
        cr = rng.normal(m_cr[mem_idx], 0.1)
        cr = np.where(np.isnan(m_cr[mem_idx]), 0.0, np.clip(cr, 0.0, 1.0))
        f = np.empty(pop_size)
        for i in range(pop_size):
            val = m_f[mem_idx[i]] + 0.1 * rng.standard_cauchy()
            while val <= 0.0:
                val = m_f[mem_idx[i]] + 0.1 * rng.standard_cauchy()
            f[i] = min(val, 1.0)

        order = np.argsort(fit, kind="stable")
        p_num = max(2, round(p_best * pop_size))
        pbest_rows = pop[order[rng.integers(p_num, size=pop_size)]]

        r1 = rng.integers(pop_size, size=pop_size)
        r2 = rng.integers(pop_size + len(archive), size=pop_size)
        for i in range(pop_size):
            while r1[i] == i:
                r1[i] = rng.integers(pop_size)
            while r2[i] == i or r2[i] == r1[i]:
                r2[i] = rng.integers(pop_size + len(archive))

        jrand = rng.integers(n, size=pop_size)
        cross = rng.random((pop_size, n)) < cr[:, None]
        cross[np.arange(pop_size), jrand] = True

        pool = np.vstack([pop] + archive) if archive else pop
        mutants = pop + f[:, None] * (pbest_rows - pop) + f[:, None] * (pop[r1] - pool[r2])
        mutants = reflect_into_bounds(mutants, lo, hi)
        trials = np.where(cross, mutants, pop)

        s_f, s_cr, deltas = [], [], []
        for i in range(pop_size):
            if handle.remaining <= 0 or should_stop():
                break
            f_trial = handle.evaluate(trials[i])
            if f_trial < fit[i]:
                archive.append(pop[i].copy())
                s_f.append(f[i])
                s_cr.append(cr[i])
                deltas.append(fit[i] - f_trial)
                pop[i] = trials[i]
                fit[i] = f_trial

        if deltas:
            w = np.asarray(deltas)
            w = w / w.sum()
            sf = np.asarray(s_f)
            m_f[mem_pos] = (w * sf * sf).sum() / (w * sf).sum()
            scr = np.asarray(s_cr)
            if np.isnan(m_cr[mem_pos]) or scr.max() <= 0.0:
                m_cr[mem_pos] = np.nan
            else:
                m_cr[mem_pos] = (w * scr * scr).sum() / max((w * scr).sum(), 1e-100)
            mem_pos = (mem_pos + 1) % memory_size

        archive_cap = round(archive_rate * pop_size)
        while len(archive) > archive_cap:
            archive.pop(int(rng.integers(len(archive))))

        target = lpsr_target(n_init, n_min, handle.evals_used, budget)
        if target < pop_size:
            keep = np.argsort(fit, kind="stable")[:target]
            keep.sort()  # preserve original ordering of survivors
            pop = pop[keep]
            fit = fit[keep]
            pop_size = target
        if on_generation is not None:
            on_generation(handle.evals_used, pop_size)
