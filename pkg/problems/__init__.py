"""
Synthetic finite-sum objectives with stochastic-gradient oracles.
"""

from .oracle import ProblemOracle, ProblemMetadata
from .quadratic import QuadraticProblem
from .logistic import LogisticProblem
from .phaseret import PhaseRetrievalProblem
from .registry import ProblemRegistry, make_problem, get_problem_registry, default_registry

__all__ = [
    "ProblemOracle",
    "ProblemMetadata",
    "QuadraticProblem",
    "LogisticProblem",
    "PhaseRetrievalProblem",
    "ProblemRegistry",
    "make_problem",
    "get_problem_registry",
    "default_registry",
]
