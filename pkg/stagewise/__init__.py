"""
Stagewise learning on prox-regularized objectives with Moreau-gradient reporting.
"""

from .prox_objective import ProxObjective, prox_objective
from .driver import (
    StageConfig,
    StageReport,
    StagewiseResult,
    StageTrajectory,
    Lemma5Report,
    stage_length,
    run_stage,
    stagewise_run,
    lemma5_check,
)

__all__ = [
    "ProxObjective",
    "prox_objective",
    "StageConfig",
    "StageReport",
    "StagewiseResult",
    "StageTrajectory",
    "Lemma5Report",
    "stage_length",
    "run_stage",
    "stagewise_run",
    "lemma5_check",
]
