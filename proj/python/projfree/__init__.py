"""Projection-free optimization over strongly convex sets."""

from ._projfree import (
    FeasibleSet,
    ProjfreeError,
    __version__,
    dual_exponent,
    gradient_norm_floor,
    loglog_slope,
    lp_norm,
    nonconvex_constant,
    run,
    run_criterion,
    spa_batch_size,
    step_size_predefined,
    suite_criteria,
)

__all__ = [
    "FeasibleSet",
    "ProjfreeError",
    "__version__",
    "dual_exponent",
    "gradient_norm_floor",
    "loglog_slope",
    "lp_norm",
    "nonconvex_constant",
    "run",
    "run_criterion",
    "spa_batch_size",
    "step_size_predefined",
    "suite_criteria",
]
