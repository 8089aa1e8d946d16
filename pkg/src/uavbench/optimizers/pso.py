"""Global-best particle swarm with inertia damping and velocity clamping.

Two named parameter sets ship: `pso` (canonical constriction-style
coefficients) and `spso`, the swarm tuned to the radial/angular path
encoding: positions and velocities live directly in the (r, psi, phi)
coordinates of the objective's native bounds, with a tighter velocity
cap and slower inertia decay.
"""

from __future__ import annotations

import numpy as np

from ._common import uniform_population


def min_budget(dim: int, hyper: dict) -> int:
    return int(hyper.get("swarm", 50))


min_budget_spso = min_budget


def _swarm_search(handle, rng, should_stop, swarm, w, w_damp, w_min, c1, c2, v_frac):
    n = handle.arity
    lo, hi = handle.lo, handle.hi
    span = hi - lo
    v_max = v_frac * span

    pos = uniform_population(rng, lo, hi, swarm)
    vel = np.zeros_like(pos)
    fit = np.array([handle.evaluate(x) for x in pos])
    pbest = pos.copy()
    pbest_f = fit.copy()
    g = int(np.argmin(fit))
    gbest = pos[g].copy()
    gbest_f = float(fit[g])

    while handle.remaining > 0 and not should_stop():
        u1 = rng.random((swarm, n))
        u2 = rng.random((swarm, n))
        for i in range(swarm):
            if handle.remaining <= 0 or should_stop():
                return
            v = w * vel[i] + c1 * u1[i] * (pbest[i] - pos[i]) + c2 * u2[i] * (gbest - pos[i])
            np.clip(v, -v_max, v_max, out=v)
            x = pos[i] + v
            low_hit = x < lo
            high_hit = x > hi
            if low_hit.any() or high_hit.any():
                x = np.where(low_hit, lo, np.where(high_hit, hi, x))
                v = np.where(low_hit | high_hit, 0.0, v)
            pos[i] = x
            vel[i] = v
            f = handle.evaluate(x)
            if f < pbest_f[i]:
                pbest[i] = x
                pbest_f[i] = f
                if f < gbest_f:
                    gbest = x.copy()
                    gbest_f = f
        w = max(w_min, w * w_damp)


def pso(
    handle,
    rng,
    should_stop,
    swarm: int = 50,
    w: float = 0.9,
    w_damp: float = 0.99,
    w_min: float = 0.4,
    c1: float = 1.49445,
    c2: float = 1.49445,
    v_frac: float = 0.2,
):
    _swarm_search(handle, rng, should_stop, swarm, w, w_damp, w_min, c1, c2, v_frac)


def spso(
    handle,
    rng,
    should_stop,
    swarm: int = 50,
    w: float = 1.0,
    w_damp: float = 0.98,
    w_min: float = 0.1,
    c1: float = 1.5,
    c2: float = 1.5,
    v_frac: float = 0.1,
):
    _swarm_search(handle, rng, should_stop, swarm, w, w_damp, w_min, c1, c2, v_frac)
