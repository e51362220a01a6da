"""
memsgd
======

Deterministic single-process simulator for memory-based distributed SGD with
momentum and sparse communication, plus runtime checks of the transformation
identity, the memory and momentum bounds, and a stagewise driver for weakly
convex problems.

Typical usage:

    from memsgd import RunConfig, ProblemSpec, Schedule, ScheduleFamily, run

    config = RunConfig(
        problem=ProblemSpec(name="quadratic", d=20, n=200),
        schedule=Schedule(ScheduleFamily.CONSTANT, beta=0.9, eta0=0.1, horizon=1000),
        compressor=CompressorSpec.top_k(2),
        T=1000,
    )
    result = run(config)
    print(result.rows[-1].F)
"""

from .config.settings import Settings, settings
from .config.logging_config import logger, setup_logger
from .config.run_config import ProblemSpec, RunConfig, Variant

from .core import (
    ParamVector,
    SparseMask,
    WorkerState,
    MetricsRow,
    CSV_COLUMNS,
    Schedule,
    ScheduleFamily,
    worker_rng_stream,
)

from .problems import (
    ProblemOracle,
    ProblemMetadata,
    QuadraticProblem,
    LogisticProblem,
    PhaseRetrievalProblem,
    ProblemRegistry,
    make_problem,
)

from .compress import (
    CompressorKind,
    CompressorSpec,
    top_k_mask,
    random_k_mask,
    apply_mask,
    memory_norm_bound,
)

from .engine import Engine, EngineState, RunResult, run, schedule_eval, worker_step

from .diagnose import (
    TheoryConstants,
    BoundKind,
    build_z,
    transform_residual,
    theorem_bound,
    lemma2_check,
    lemma6_check,
    moreau_grad_estimate,
    reference_run,
)

from .stagewise import StageConfig, StageReport, StagewiseResult, prox_objective, stagewise_run, lemma5_check

from .observability.metrics import MetricsCollector, InMemoryMetricsCollector

from .exceptions import (
    MemSGDException,
    ConfigurationError,
    ValidationError,
    DimensionMismatchError,
    ProblemError,
    UnknownProblemError,
    CompressorError,
    ScheduleError,
    NumericalError,
    NonFiniteError,
    ProxSolveError,
    InvariantViolationError,
    InputFileError,
)

__all__ = [
    # Config / logging
    "Settings",
    "settings",
    "logger",
    "setup_logger",
    "ProblemSpec",
    "RunConfig",
    "Variant",
    # Core types
    "ParamVector",
    "SparseMask",
    "WorkerState",
    "MetricsRow",
    "CSV_COLUMNS",
    "Schedule",
    "ScheduleFamily",
    "worker_rng_stream",
    # Problems
    "ProblemOracle",
    "ProblemMetadata",
    "QuadraticProblem",
    "LogisticProblem",
    "PhaseRetrievalProblem",
    "ProblemRegistry",
    "make_problem",
    # Compression
    "CompressorKind",
    "CompressorSpec",
    "top_k_mask",
    "random_k_mask",
    "apply_mask",
    "memory_norm_bound",
    # Engine
    "Engine",
    "EngineState",
    "RunResult",
    "run",
    "schedule_eval",
    "worker_step",
    # Diagnostics
    "TheoryConstants",
    "BoundKind",
    "build_z",
    "transform_residual",
    "theorem_bound",
    "lemma2_check",
    "lemma6_check",
    "moreau_grad_estimate",
    "reference_run",
    # Stagewise
    "StageConfig",
    "StageReport",
    "StagewiseResult",
    "prox_objective",
    "stagewise_run",
    "lemma5_check",
    # Observability
    "MetricsCollector",
    "InMemoryMetricsCollector",
    # Exceptions
    "MemSGDException",
    "ConfigurationError",
    "ValidationError",
    "DimensionMismatchError",
    "ProblemError",
    "UnknownProblemError",
    "CompressorError",
    "ScheduleError",
    "NumericalError",
    "NonFiniteError",
    "ProxSolveError",
    "InvariantViolationError",
    "InputFileError",
]
