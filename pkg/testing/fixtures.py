"""
Test fixtures and utilities for testing.
"""
from typing import Callable, Dict, Iterable, List, Optional, TypeVar

import numpy as np
from joblib import Parallel, delayed

from ..compress.spec import CompressorSpec
from ..config.run_config import ProblemSpec, RunConfig, Variant
from ..core.schedule import Schedule, ScheduleFamily
from ..core.vectors import ParamVector
from ..problems.logistic import LogisticProblem
from ..problems.oracle import ProblemMetadata, ProblemOracle
from ..problems.phaseret import PhaseRetrievalProblem
from ..problems.quadratic import QuadraticProblem

ItemT = TypeVar("ItemT")
ResultT = TypeVar("ResultT")


class ZeroProblem(ProblemOracle):
    """F(w) = 0 everywhere; handy for checking wrappers in isolation."""

    def __init__(self, d: int = 1, n: int = 1):
        super().__init__(name="zero", d=d, n=n, metadata=ProblemMetadata(L=0.0, mu=0.0, c=0.0))
        self.w_star = np.zeros(d)
        self.F_star = 0.0

    def per_sample_losses(self, w: ParamVector, batch: np.ndarray) -> np.ndarray:
        return np.zeros(batch.shape[0])

    def per_sample_gradients(self, w: ParamVector, batch: np.ndarray) -> np.ndarray:
        return np.zeros((batch.shape[0], self.d))


def identity_quadratic(zeta) -> QuadraticProblem:
    """Quadratic with Lambda = I around the given data points."""
    zeta = np.atleast_2d(np.asarray(zeta, dtype=np.float64))
    return QuadraticProblem(zeta, np.ones(zeta.shape[1]))


def make_quadratic(
    d: int = 5,
    n: int = 20,
    data_seed: int = 0,
    mu: float = 1.0,
    L: float = 4.0,
    noise: float = 1.0,
) -> QuadraticProblem:
    """Small generated quadratic."""
    return QuadraticProblem.generate(d, n, data_seed, mu=mu, L=L, noise=noise)


def make_logistic(d: int = 5, n: int = 60, data_seed: int = 1, reg: float = 0.1) -> LogisticProblem:
    """Small generated logistic regression."""
    return LogisticProblem.generate(d, n, data_seed, reg=reg, noise=0.1)


def make_phaseret(d: int = 5, n: int = 40, data_seed: int = 0, noise: float = 0.0) -> PhaseRetrievalProblem:
    """Small generated phase retrieval problem."""
    return PhaseRetrievalProblem.generate(d, n, data_seed, noise=noise)


def make_schedule(
    family: ScheduleFamily = ScheduleFamily.CONSTANT,
    beta: float = 0.9,
    eta0: float = 0.1,
    T: int = 100,
    alpha: Optional[float] = None,
    mu: Optional[float] = None,
) -> Schedule:
    """Schedule with the family-specific parameters filled in."""
    family = ScheduleFamily(family)
    if family == ScheduleFamily.POWER and alpha is None:
        alpha = 0.75
    if family == ScheduleFamily.STRONG_CONVEX and mu is None:
        mu = 1.0
    horizon = T if family == ScheduleFamily.CONSTANT else None
    return Schedule(family=family, beta=beta, eta0=eta0, alpha=alpha, mu=mu, horizon=horizon)


def make_run_config(
    problem: str = "quadratic",
    d: int = 10,
    n: int = 50,
    T: int = 100,
    p: int = 4,
    b: int = 4,
    beta: float = 0.9,
    family: ScheduleFamily = ScheduleFamily.CONSTANT,
    eta0: float = 0.1,
    compressor: Optional[CompressorSpec] = None,
    variant: Variant = Variant.MDSGD,
    run_seed: int = 0,
    n_diag: int = 10,
    threads: int = 1,
    check_invariants: bool = False,
    **problem_kwargs,
) -> RunConfig:
    """RunConfig for a small run; top-K with q = 2 unless told otherwise."""
    return RunConfig(
        problem=ProblemSpec(name=problem, d=d, n=n, **problem_kwargs),
        schedule=make_schedule(family, beta=beta, eta0=eta0, T=T),
        p=p,
        b=b,
        compressor=CompressorSpec.top_k(2) if compressor is None else compressor,
        variant=variant,
        T=T,
        run_seed=run_seed,
        n_diag=n_diag,
        threads=threads,
        check_invariants=check_invariants,
    )


def make_config_text(sections: Optional[Dict[str, Dict[str, object]]] = None) -> str:
    """
    Render an experiment config. The minimal [problem]/[engine] keys are
    always present and ``sections`` adds or overrides keys.
    """
    merged: Dict[str, Dict[str, object]] = {
        "problem": {"name": "quadratic", "d": 20},
        "engine": {"T": 1000},
    }
    for name, values in (sections or {}).items():
        merged.setdefault(name, {}).update(values)
    lines = []
    for name, values in merged.items():
        lines.append(f"[{name}]")
        lines.extend(f"{key} = {value}" for key, value in values.items())
        lines.append("")
    return "\n".join(lines)


# Pytest-style fixtures (can be used with pytest or manually)
def quadratic_problem() -> QuadraticProblem:
    """Create a small quadratic problem."""
    return make_quadratic()


def logistic_problem() -> LogisticProblem:
    """Create a small logistic problem."""
    return make_logistic()


def phaseret_problem() -> PhaseRetrievalProblem:
    """Create a small phase retrieval problem."""
    return make_phaseret()


def run_config() -> RunConfig:
    """Create a small top-K run configuration."""
    return make_run_config()


def run_many(fn: Callable[[ItemT], ResultT], items: Iterable[ItemT], n_jobs: int = -1) -> List[ResultT]:
    """Apply ``fn`` to independent items in worker processes, keeping input order."""
    return Parallel(n_jobs=n_jobs)(delayed(fn)(item) for item in items)
