"""
Diagnostics: the transformation sequence, bound checks, theory constants,
Moreau-envelope gradients and dense reference runs.
"""

from .transform import TransformRecord, build_z, transform_record, transform_residual
from .theory import (
    BoundKind,
    TheoryConstants,
    theorem1_constant,
    theorem_bound,
    strong_convex_constant,
    convex_constant,
    nonconvex_constant,
    lemma5_constant,
    theorem6_constant,
    theorem6_rhs,
)
from .checks import (
    BoundReport,
    LearningRateReport,
    AlphaDeltaFit,
    lemma2_check,
    lemma6_check,
    momentum_bound_check,
    learning_rate_condition,
    fit_alpha_delta,
)
from .moreau import MoreauEstimate, moreau_grad_estimate
from .reference import reference_run, trajectories_identical

__all__ = [
    "TransformRecord",
    "build_z",
    "transform_record",
    "transform_residual",
    "BoundKind",
    "TheoryConstants",
    "theorem1_constant",
    "theorem_bound",
    "strong_convex_constant",
    "convex_constant",
    "nonconvex_constant",
    "lemma5_constant",
    "theorem6_constant",
    "theorem6_rhs",
    "BoundReport",
    "LearningRateReport",
    "AlphaDeltaFit",
    "lemma2_check",
    "lemma6_check",
    "momentum_bound_check",
    "learning_rate_condition",
    "fit_alpha_delta",
    "MoreauEstimate",
    "moreau_grad_estimate",
    "reference_run",
    "trajectories_identical",
]
