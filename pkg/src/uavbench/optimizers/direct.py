"""Deterministic dividing-rectangles global search.

Works on the unit box (candidates mapped affinely to the native bounds),
samples the center first, then repeatedly trisects the potentially optimal
hyperrectangles chosen by the lower-convex-hull rule with the usual
balance parameter. Ignores the seed entirely.
"""

from __future__ import annotations

import numpy as np


def min_budget(dim: int, hyper: dict) -> int:
    return 1


class _OutOfBudget(Exception):
    pass


class _Rect:
    __slots__ = ("center", "t", "f", "d", "key")

    def __init__(self, center: np.ndarray, t: np.ndarray, f: float):
        self.center = center
        self.t = t
        self.f = f
        key = tuple(sorted(t.tolist()))
        self.key = key
        # half-diagonal, computed from the sorted side exponents so equal
        # shapes group to bit-identical measures
        self.d = 0.5 * float(np.sqrt(np.sum(3.0 ** (-2.0 * np.array(key)))))


def _potentially_optimal(rects: list[_Rect], f_min: float, eps: float) -> list[int]:
    groups: dict[tuple, tuple[float, float, int]] = {}
    for i, r in enumerate(rects):
        got = groups.get(r.key)
        if got is None or r.f < got[1]:
            groups[r.key] = (r.d, r.f, i)
    entries = sorted(groups.values(), key=lambda g: g[0])

    chosen = []
    for d_j, f_j, idx in entries:
        left = -np.inf
        right = np.inf
        for d_i, f_i, _ in entries:
            if d_i < d_j:
                left = max(left, (f_j - f_i) / (d_j - d_i))
            elif d_i > d_j:
                right = min(right, (f_i - f_j) / (d_i - d_j))
        if left > right:
            continue
        if right < np.inf:
            if f_min != 0.0:
                ok = (f_min - f_j) / abs(f_min) + d_j * right / abs(f_min) >= eps
            else:
                ok = f_j <= d_j * right
            if not ok:
                continue
        chosen.append(idx)
    if not chosen:  # numerical fallback: split the largest rectangle
        chosen = [max(range(len(rects)), key=lambda i: (rects[i].d, -rects[i].f))]
    return chosen


def direct(handle, rng, should_stop, eps: float = 1e-4):
    n = handle.arity
    lo, hi = handle.lo, handle.hi
    span = hi - lo

    def ev(c):
        # always evaluate at least once so the run has a valid incumbent
        if handle.remaining <= 0 or (should_stop() and handle.evals_used > 0):
            raise _OutOfBudget
        return handle.evaluate(lo + c * span)

    try:
        center = np.full(n, 0.5)
        rects = [_Rect(center, np.zeros(n, dtype=int), ev(center))]
        while handle.remaining > 0 and not should_stop():
            for idx in _potentially_optimal(rects, handle.best_f, eps):
                rect = rects[idx]
                t_min = int(rect.t.min())
                long_dims = [i for i in range(n) if rect.t[i] == t_min]
                delta = 3.0 ** (-(t_min + 1))

                samples = []
                for dim in long_dims:
                    plus = rect.center.copy()
                    plus[dim] += delta
                    minus = rect.center.copy()
                    minus[dim] -= delta
                    f_plus = ev(plus)
                    f_minus = ev(minus)
                    samples.append((min(f_plus, f_minus), dim, plus, f_plus, minus, f_minus))

                samples.sort(key=lambda s: (s[0], s[1]))
                for _, dim, plus, f_plus, minus, f_minus in samples:
                    rect.t[dim] += 1
                    rects.append(_Rect(plus, rect.t.copy(), f_plus))
                    rects.append(_Rect(minus, rect.t.copy(), f_minus))
                rect.key = tuple(sorted(rect.t.tolist()))
                rect.d = 0.5 * float(np.sqrt(np.sum(3.0 ** (-2.0 * np.array(rect.key)))))
    except _OutOfBudget:
        pass
