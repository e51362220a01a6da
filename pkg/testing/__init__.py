"""
Testing infrastructure and fixtures.
"""

from .fixtures import (
    ZeroProblem,
    identity_quadratic,
    make_quadratic,
    make_logistic,
    make_phaseret,
    make_schedule,
    make_run_config,
    make_config_text,
    quadratic_problem,
    logistic_problem,
    phaseret_problem,
    run_config,
    run_many,
)

__all__ = [
    "ZeroProblem",
    "identity_quadratic",
    "make_quadratic",
    "make_logistic",
    "make_phaseret",
    "make_schedule",
    "make_run_config",
    "make_config_text",
    "quadratic_problem",
    "logistic_problem",
    "phaseret_problem",
    "run_config",
    "run_many",
]
