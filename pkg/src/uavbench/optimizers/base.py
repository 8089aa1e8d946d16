"""Common optimizer interface: counted, bounded objective handles with
incumbent tracking, optimizer specs, and the single `optimize` entry point.

Every optimizer consumes evaluations only through an ObjectiveHandle, which
enforces the budget, rejects out-of-bounds candidates, and records the
convergence trace. Runs are deterministic given (spec, objective, seed);
wall-cap truncation is the one sanctioned source of nondeterminism.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np


class BudgetExceededError(RuntimeError):
    """An optimizer asked for an evaluation past the configured budget."""


class BoundsViolationError(RuntimeError):
    """An optimizer submitted a candidate outside the search box."""


class OptimizerConfigError(ValueError):
    """Spec/budget combination cannot start (e.g. budget < population)."""


@dataclass
class Trace:
    """Best-so-far milestones: (evaluations_used, best_value) pairs."""

    milestones: list[tuple[int, float]] = field(default_factory=list)

    def best_at(self, evals: int):
        """Last-observation-carried-forward lookup; None before first entry."""
        value = None
        for used, best in self.milestones:
            if used > evals:
                break
            value = best
        return value


@dataclass
class OptimizerSpec:
    """Name plus hyperparameter overrides; echoed into run records."""

    name: str
    hyperparameters: dict = field(default_factory=dict)
    init_policy: str = "uniform"


class ObjectiveHandle:
    """Counting, bounds-checking wrapper around a scalar objective."""

    def __init__(self, fn, lo: np.ndarray, hi: np.ndarray, budget: int):
        self.fn = fn
        self.lo = np.asarray(lo, dtype=np.float64)
        self.hi = np.asarray(hi, dtype=np.float64)
        self.arity = self.lo.shape[0]
        self.budget = int(budget)
        self.evals_used = 0
        self.best_x: np.ndarray | None = None
        self.best_f = np.inf
        self.trace = Trace()
        self._tol = 1e-9 * np.maximum(1.0, np.abs(self.hi - self.lo))

    @property
    def remaining(self) -> int:
        return self.budget - self.evals_used

    def evaluate(self, x) -> float:
        if self.evals_used >= self.budget:
            raise BudgetExceededError(
                f"budget of {self.budget} evaluations exhausted"
            )
        x = np.asarray(x, dtype=np.float64)
        if (x < self.lo - self._tol).any() or (x > self.hi + self._tol).any():
            raise BoundsViolationError("candidate outside bounds")
        value = float(self.fn(x))
        self.evals_used += 1
        if value < self.best_f:
            self.best_f = value
            self.best_x = x.copy()
            self.trace.milestones.append((self.evals_used, value))
        return value

    __call__ = evaluate

    def finalize_trace(self) -> Trace:
        """Close the trace with a milestone at the final evaluation count."""
        if self.evals_used and (
            not self.trace.milestones
            or self.trace.milestones[-1][0] != self.evals_used
        ):
            self.trace.milestones.append((self.evals_used, self.best_f))
        return self.trace


@dataclass
class OptimizeResult:
    best_x: np.ndarray
    best_f: float
    trace: Trace
    evals_used: int
    wall_seconds: float
    truncated: bool


def _registry():
    from .agsk import agsk, min_budget as agsk_min
    from .de import de, min_budget as de_min
    from .direct import direct, min_budget as direct_min
    from .lshade import lshade, min_budget as lshade_min
    from .nelder_mead import min_budget as nm_min, nelder_mead_restart
    from .pso import min_budget as pso_min, min_budget_spso, pso, spso

    return {
        "nm": (nelder_mead_restart, nm_min),
        "direct": (direct, direct_min),
        "de": (de, de_min),
        "pso": (pso, pso_min),
        "spso": (spso, min_budget_spso),
        "lshade": (lshade, lshade_min),
        "agsk": (agsk, agsk_min),
    }


def available_optimizers() -> list[str]:
    return sorted(_registry())


def optimize(
    spec: OptimizerSpec,
    fn,
    lo: np.ndarray,
    hi: np.ndarray,
    budget: int,
    wall_cap: float | None = None,
    seed: int = 0,
) -> OptimizeResult:
    """Run one optimizer against a raw objective under budget and wall caps."""
    registry = _registry()
    if spec.name not in registry:
        raise OptimizerConfigError(
            f"unknown optimizer {spec.name!r}; available: {available_optimizers()}"
        )
    run, min_budget = registry[spec.name]
    dim = np.asarray(lo).shape[0]
    needed = min_budget(dim, spec.hyperparameters)
    if budget < needed:
        raise OptimizerConfigError(
            f"{spec.name} needs at least {needed} evaluations in dimension "
            f"{dim}, got budget {budget}"
        )

    handle = ObjectiveHandle(fn, lo, hi, budget)
    rng = np.random.default_rng(seed)
    t0 = time.monotonic()
    if wall_cap is None:
        should_stop = lambda: False  # noqa: E731
    else:
        should_stop = lambda: time.monotonic() - t0 > wall_cap  # noqa: E731

    run(handle, rng, should_stop, **spec.hyperparameters)

    wall = time.monotonic() - t0
    truncated = handle.remaining > 0 and wall_cap is not None and wall > wall_cap
    return OptimizeResult(
        best_x=handle.best_x,
        best_f=handle.best_f,
        trace=handle.finalize_trace(),
        evals_used=handle.evals_used,
        wall_seconds=wall,
        truncated=truncated,
    )
