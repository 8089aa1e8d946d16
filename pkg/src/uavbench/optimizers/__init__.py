"""Black-box optimizer roster behind a single budgeted interface."""

from .agsk import agsk
from .base import (
    BoundsViolationError,
    BudgetExceededError,
    ObjectiveHandle,
    OptimizeResult,
    OptimizerConfigError,
    OptimizerSpec,
    Trace,
    available_optimizers,
    optimize,
)
from .de import de
from .direct import direct
from .lshade import lpsr_target, lshade
from .nelder_mead import nelder_mead_restart
from .pso import pso, spso

__all__ = [
    "BoundsViolationError",
    "BudgetExceededError",
    "ObjectiveHandle",
    "OptimizeResult",
    "OptimizerConfigError",
    "OptimizerSpec",
    "Trace",
    "agsk",
    "available_optimizers",
    "de",
    "direct",
    "lpsr_target",
    "lshade",
    "nelder_mead_restart",
    "optimize",
    "pso",
    "spso",
]
