"""
The simulator: schedules, the per-worker update and the run loop.
"""

from .schedules import schedule_eval, rho_prev, eta_at, schedule_arrays
from .worker import WorkerOutput, worker_step
from .engine import Engine, EngineState, StepRecord, RunResult, RunStats, run

__all__ = [
    "schedule_eval",
    "rho_prev",
    "eta_at",
    "schedule_arrays",
    "WorkerOutput",
    "worker_step",
    "Engine",
    "EngineState",
    "StepRecord",
    "RunResult",
    "RunStats",
    "run",
]
