"""
Shared domain types and deterministic randomness plumbing.
"""

from .vectors import (
    ParamVector,
    as_param_vector,
    zeros,
    ensure_finite,
    check_same_dim,
    inf_norm,
    norm,
)
from .masks import SparseMask
from .rng import worker_rng_stream, data_rng, derive_seed
from .state import WorkerState, MetricsRow, CSV_COLUMNS
from .schedule import Schedule, ScheduleFamily

__all__ = [
    "ParamVector",
    "as_param_vector",
    "zeros",
    "ensure_finite",
    "check_same_dim",
    "inf_norm",
    "norm",
    "SparseMask",
    "worker_rng_stream",
    "data_rng",
    "derive_seed",
    "WorkerState",
    "MetricsRow",
    "CSV_COLUMNS",
    "Schedule",
    "ScheduleFamily",
]
