"""
Stagewise driver: repeated constant-step runs on prox-regularized objectives
with a shrinking step per stage.
"""
import math
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence

from ..config.logging_config import logger
from ..config.run_config import RunConfig
from ..core.rng import derive_seed
from ..core.schedule import Schedule, ScheduleFamily
from ..core.vectors import ParamVector, ensure_finite, norm
from ..diagnose.moreau import MoreauEstimate, moreau_grad_estimate
from ..diagnose.theory import lemma5_constant, theorem6_constant, theorem6_rhs
from ..engine.engine import Engine, RunResult
from ..exceptions import ConfigurationError, ValidationError
from ..observability.metrics import MetricsCollector
from ..problems.oracle import ProblemOracle
from ..problems.registry import make_problem
from .prox_objective import ProxObjective

# Inner iteration cap for the Moreau-gradient solves of a stagewise run
STAGE_PROX_MAX_ITER = 20000


@dataclass(frozen=True)
class StageConfig:
    """
    Stagewise run parameters.

    Attributes:
        base: Problem, workers, batch, compressor, variant and seeds; its
            schedule and T are replaced per stage
        S: Number of stages
        eta0: Step of stage 0; stage s uses eta0 / (s + 1)
        beta: Momentum scalar
        gamma: Prox parameter; 1/(2c) when None, or 1 for convex problems
        prox_tol: Inner tolerance of the Moreau-gradient solves (settings default when None)
        prox_max_iter: Inner iteration cap of the Moreau-gradient solves
    """
    base: RunConfig
    S: int
    eta0: float
    beta: float = 0.9
    gamma: Optional[float] = None
    prox_tol: Optional[float] = None
    prox_max_iter: int = STAGE_PROX_MAX_ITER

    def __post_init__(self):
        if self.S < 1:
            raise ConfigurationError(f"S must be at least 1, got {self.S}")
        if not self.eta0 > 0.0:
            raise ConfigurationError(f"eta0 must be positive, got {self.eta0}")
        if not 0.0 <= self.beta < 1.0:
            raise ConfigurationError(f"beta must be in [0,1), got {self.beta}")
        if self.gamma is not None and not self.gamma > 0.0:
            raise ConfigurationError(f"gamma must be positive, got {self.gamma}")

    def resolve_gamma(self, c: float) -> float:
        """
        gamma for a c-weakly convex problem.

        Raises:
            ConfigurationError: If gamma >= 1/c
        """
        if self.gamma is None:
            return 1.0 if c == 0.0 else 1.0 / (2.0 * c)
        if c > 0.0 and not self.gamma < 1.0 / c:
            raise ConfigurationError(f"gamma must be below 1/c = {1.0 / c}, got {self.gamma}")
        return self.gamma

    def eta(self, s: int) -> float:
        return self.eta0 / (s + 1)


def stage_length(gamma: float, eta0: float, s: int) -> int:
    """Smallest T_s with T_s * eta_s >= 12 gamma, eta_s = eta0 / (s + 1)."""
    eta_s = eta0 / (s + 1)
    T_s = max(1, math.ceil(12.0 * gamma * (s + 1) / eta0 - 1e-9))
    while T_s * eta_s < 12.0 * gamma - 1e-12:
        T_s += 1
    return T_s


@dataclass(frozen=True)
class StageReport:
    """
    One stage.

    Attributes:
        s: Stage index
        T_s: Iterations in the stage
        eta_s: Constant step of the stage
        w_next: Uniform average of the stage iterates (next stage center)
        moreau_grad_sq: ||grad F_gamma(w_s)||^2 at the stage center
        suboptimality: F_{s,gamma}(w_next) - min F_{s,gamma}
        F_avg: F(w_next)
        weighted_avg: (1+beta) gamma / (4 S'(S'+1)) sum_{s'<S'} (s'+1) ||grad F_gamma(w_s')||^2 with S' = s + 1
    """
    s: int
    T_s: int
    eta_s: float
    w_next: ParamVector
    moreau_grad_sq: float
    suboptimality: float
    F_avg: float
    weighted_avg: float


@dataclass
class StagewiseResult:
    """
    Outcome of a stagewise run. Iterating yields the StageReports.

    Attributes:
        reports: One report per stage
        final_w: Center after the last stage
        final_moreau: Moreau-gradient estimate at final_w
        max_F: Largest F over the stage centers, final one included
        gamma: Prox parameter used
        theorem6_rhs: Right side of the stagewise bound with empirical constants
    """
    reports: List[StageReport]
    final_w: ParamVector
    final_moreau: MoreauEstimate
    max_F: float
    gamma: float
    theorem6_rhs: float
    stage_results: List[RunResult] = field(default_factory=list, repr=False)

    @property
    def final_moreau_grad_sq(self) -> float:
        return self.final_moreau.norm_sq

    @property
    def initial_moreau_grad_sq(self) -> float:
        return self.reports[0].moreau_grad_sq

    def __iter__(self) -> Iterator[StageReport]:
        return iter(self.reports)

    def __len__(self) -> int:
        return len(self.reports)


def run_stage(
    base: RunConfig,
    oracle: ProblemOracle,
    center: ParamVector,
    gamma: float,
    eta: float,
    T: int,
    beta: float,
    run_seed: int,
    metrics_collector: Optional[MetricsCollector] = None,
) -> RunResult:
    """
    One call of the base algorithm with constant step on F_{s,gamma}.

    Worker momentum and memory start from zero.
    """
    stage_oracle = ProxObjective(oracle, center, gamma)
    config = base.with_overrides(
        schedule=Schedule(ScheduleFamily.STAGE_CONSTANT, beta=beta, eta0=eta),
        T=T,
        run_seed=run_seed,
        w0=center,
    )
    return Engine(config, oracle=stage_oracle, metrics_collector=metrics_collector).run()


def stagewise_run(
    config: StageConfig,
    oracle: Optional[ProblemOracle] = None,
    metrics_collector: Optional[MetricsCollector] = None,
) -> StagewiseResult:
    """
    Run S stages starting from the problem's initial point.

    Args:
        config: Stagewise parameters
        oracle: Problem F; built from ``config.base.problem`` when None
        metrics_collector: Receives the stage runs' metrics and a
            ``moreau.unconverged`` count of inexact Moreau-gradient solves

    Returns:
        StagewiseResult

    Raises:
        ConfigurationError: If gamma is not below 1/c
        NonFiniteError: If a stage average is not finite
    """
    base = config.base
    oracle = oracle if oracle is not None else make_problem(base.problem)
    gamma = config.resolve_gamma(oracle.metadata.c)
    center = oracle.initial_point() if base.w0 is None else base.w0
    logger.info(
        f"Starting stagewise run: problem={oracle.name} S={config.S} gamma={gamma:.6g} "
        f"eta0={config.eta0} beta={config.beta}"
    )

    def moreau(w: ParamVector) -> MoreauEstimate:
        estimate = moreau_grad_estimate(
            oracle,
            w,
            gamma,
            tol=config.prox_tol,
            max_iter=config.prox_max_iter,
            raise_on_failure=False,
        )
        if not estimate.converged and metrics_collector is not None:
            metrics_collector.increment_counter("moreau.unconverged")
        return estimate

    reports: List[StageReport] = []
    results: List[RunResult] = []
    centers = [center]
    weighted_sum = 0.0
    estimate = moreau(center)
    for s in range(config.S):
        eta_s = config.eta(s)
        T_s = stage_length(gamma, config.eta0, s)
        result = run_stage(
            base, oracle, center, gamma, eta_s, T_s, config.beta,
            derive_seed(base.run_seed, s), metrics_collector,
        )
        w_next = ensure_finite(result.iterate_average, f"stage {s} average")

        stage_oracle = result.oracle
        suboptimality = stage_oracle.full_objective(w_next) - stage_oracle.full_objective(estimate.prox_point)
        weighted_sum += (s + 1) * estimate.norm_sq
        S_now = s + 1
        weighted_avg = (1.0 + config.beta) * gamma / (4.0 * S_now * (S_now + 1)) * weighted_sum

        report = StageReport(
            s=s,
            T_s=T_s,
            eta_s=eta_s,
            w_next=w_next,
            moreau_grad_sq=estimate.norm_sq,
            suboptimality=suboptimality,
            F_avg=oracle.full_objective(w_next),
            weighted_avg=weighted_avg,
        )
        logger.info(
            f"Stage {s}: T_s={T_s} eta_s={eta_s:.4g} F_avg={report.F_avg:.6e} "
            f"moreau_grad_sq={report.moreau_grad_sq:.4e} suboptimality={suboptimality:.3e}"
        )
        reports.append(report)
        results.append(result)
        center = w_next
        centers.append(center)
        estimate = moreau(center)

    max_F = max(oracle.full_objective(w) for w in centers)
    U = max(r.memory_bound for r in results)
    if oracle.w_star is not None:
        B = max(norm(w - oracle.w_star) for w in centers)
    else:
        B = 0.0
    C_hat, _ = theorem6_constant(oracle.G_est, B, U, gamma, config.beta)
    F_star = oracle.F_star if oracle.F_star is not None else min(r.F_avg for r in reports)
    rhs = theorem6_rhs(max_F, F_star, C_hat, config.eta0, config.S)

    logger.info(
        f"Finished stagewise run: final moreau_grad_sq={estimate.norm_sq:.4e} "
        f"initial={reports[0].moreau_grad_sq:.4e} max_F={max_F:.6e}"
    )
    return StagewiseResult(
        reports=reports,
        final_w=center,
        final_moreau=estimate,
        max_F=max_F,
        gamma=gamma,
        theorem6_rhs=rhs,
        stage_results=results,
    )


@dataclass(frozen=True)
class StageTrajectory:
    """
    What the one-stage bound needs from a stage run.

    Attributes:
        start: Stage starting point w
        average: Uniform average of the stage iterates
        eta: Constant step
        T: Iterations
        U_est: Largest ||u_t|| seen
        G_est: Gradient bound of the stage objective
    """
    start: ParamVector
    average: ParamVector
    eta: float
    T: int
    U_est: float
    G_est: float

    @classmethod
    def from_result(cls, result: RunResult) -> "StageTrajectory":
        config = result.config
        return cls(
            start=result.oracle.initial_point() if config.w0 is None else config.w0,
            average=result.iterate_average,
            eta=config.schedule.eta0,
            T=config.T,
            U_est=result.memory_bound,
            G_est=result.gradient_bound,
        )


@dataclass(frozen=True)
class Lemma5Report:
    """
    Attributes:
        lhs: Mean over trajectories of phi(average) - phi(w_star)
        rhs: (1 - beta) / (2 eta T) ||start - w_star||^2 + C eta
        C: One-stage constant
    """
    lhs: float
    rhs: float
    C: float

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


def lemma5_check(
    trajectories: Sequence[StageTrajectory],
    oracle: ProblemOracle,
    w_star: ParamVector,
    beta: float,
    U_est: Optional[float] = None,
    G_est: Optional[float] = None,
) -> Lemma5Report:
    """
    Compare the averaged one-stage suboptimality with its bound.

    Args:
        trajectories: Stage runs sharing start, eta and T (one per seed)
        oracle: Stage objective phi
        w_star: Minimizer of phi from a high-precision solve
        beta: Momentum scalar
        U_est: Memory bound (max over trajectories when None)
        G_est: Gradient bound (max over trajectories when None)

    Raises:
        ValidationError: If trajectories is empty or they disagree on start, eta or T
    """
    if not trajectories:
        raise ValidationError("lemma5_check needs at least one trajectory")
    first = trajectories[0]
    for traj in trajectories[1:]:
        if traj.eta != first.eta or traj.T != first.T or not (traj.start == first.start).all():
            raise ValidationError("trajectories must share start, eta and T")
    U = max(t.U_est for t in trajectories) if U_est is None else U_est
    G = max(t.G_est for t in trajectories) if G_est is None else G_est
    phi_star = oracle.full_objective(w_star)
    lhs = sum(oracle.full_objective(t.average) - phi_star for t in trajectories) / len(trajectories)
    C = lemma5_constant(G, U, beta)
    dist_sq = float((first.start - w_star) @ (first.start - w_star))
    rhs = (1.0 - beta) / (2.0 * first.eta * first.T) * dist_sq + C * first.eta
    return Lemma5Report(lhs=lhs, rhs=rhs, C=C)
