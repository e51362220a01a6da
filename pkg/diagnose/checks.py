"""
Run-time bound checks over collected metrics.

The bounds hold in expectation; single runs are checked against observed maxima
(G from the visited domain, U from the largest memory norm seen).
"""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy.special import zeta

from ..compress.masks import memory_norm_bound
from ..core.schedule import Schedule, ScheduleFamily
from ..core.state import MetricsRow
from ..engine.schedules import eta_at, rho_prev, schedule_arrays
from ..exceptions import ValidationError

# Slack for comparisons that hold with equality in exact arithmetic
_REL_SLACK = 1e-12


@dataclass
class BoundReport:
    """
    Outcome of a bound check.

    Attributes:
        name: Which bound
        checked: Number of comparisons made
        violations: Iterations (or row indices) where the bound failed
        max_lhs: Largest left side seen
        min_margin: Smallest right side minus left side
    """
    name: str
    checked: int = 0
    violations: List[int] = field(default_factory=list)
    max_lhs: float = 0.0
    min_margin: float = math.inf

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, key: int, lhs: float, rhs: float) -> None:
        self.checked += 1
        self.max_lhs = max(self.max_lhs, lhs)
        self.min_margin = min(self.min_margin, rhs - lhs)
        if lhs > rhs + _REL_SLACK * abs(rhs):
            self.violations.append(key)


def lemma2_check(
    rows: Sequence[MetricsRow],
    G: float,
    beta: float,
    U: float,
    schedule: Schedule,
) -> BoundReport:
    """
    ||z_t - w_t||^2 <= 2 G^2 rho_{t-1}^2 / (1 - beta)^2 + 2 U^2 eta_t^2 per row.

    Args:
        rows: Diagnostics rows
        G: Gradient bound
        beta: Momentum scalar
        U: Memory bound
        schedule: Schedule the run used (rho_{t-1} is recomputed from it)
    """
    if not 0.0 <= beta < 1.0:
        raise ValidationError(f"beta must be in [0,1), got {beta}")
    report = BoundReport("z-to-w distance")
    for row in rows:
        rho = rho_prev(schedule, row.t)
        eta = eta_at(schedule, row.t)
        rhs = 2.0 * G * G * rho * rho / (1.0 - beta) ** 2 + 2.0 * U * U * eta * eta
        report.add(row.t, row.zw_dist ** 2, rhs)
    return report


def lemma6_check(
    rows: Sequence[MetricsRow],
    d: int,
    q: int,
    G: float,
    beta: float,
    observed_max: Optional[float] = None,
) -> BoundReport:
    """
    max ||u_t||^2 <= 2(d-q)(2d+q) G^2 / ((1-beta)^2 q^2).

    ``observed_max`` is the run-wide largest ||u_t|| (rows only see every
    N_diag-th iterate).
    """
    bound = memory_norm_bound(d, q, G, beta)
    report = BoundReport("memory norm")
    for row in rows:
        report.add(row.t, row.mem_norm ** 2, bound)
    if observed_max is not None:
        report.add(-1, observed_max ** 2, bound)
    return report


def momentum_bound_check(max_momentum_norm: float, G: float, beta: float) -> BoundReport:
    """max ||g_t|| <= G / (1 - beta)."""
    if not 0.0 <= beta < 1.0:
        raise ValidationError(f"beta must be in [0,1), got {beta}")
    report = BoundReport("momentum norm")
    report.add(-1, max_momentum_norm, G / (1.0 - beta))
    return report


@dataclass(frozen=True)
class LearningRateReport:
    """
    Partial sums of gamma_t up to T.

    ``reference_*`` hold closed-form asymptotics for the decaying families
    (exact values for the flat ones).
    """
    T: int
    sum_gamma: float
    sum_gamma_sq: float
    reference_sum_gamma: float
    reference_sum_gamma_sq: float

    @property
    def ratio(self) -> float:
        """sum gamma_t^2 / sum gamma_t."""
        return self.sum_gamma_sq / self.sum_gamma


def _power_sum(a: float, T: int) -> float:
    """Leading asymptotics of sum_{s=1}^{T} s^{-a}."""
    if a == 1.0:
        return math.log(T) + np.euler_gamma
    if a < 1.0:
        return T ** (1.0 - a) / (1.0 - a)
    return float(zeta(a)) - T ** (1.0 - a) / (a - 1.0)


def _gamma_law(schedule: Schedule):
    """(scale, exponent) such that gamma_t = scale / (t + 1)^exponent."""
    family = schedule.family
    if family == ScheduleFamily.POWER:
        return schedule.eta0, schedule.alpha
    if family == ScheduleFamily.STRONG_CONVEX:
        return 1.0 / schedule.mu, 1.0
    if family == ScheduleFamily.CONVEX_SQRT:
        return schedule.eta0, 0.5
    return None


def learning_rate_condition(schedule: Schedule, T: int) -> LearningRateReport:
    """
    Sum of gamma_t and of gamma_t^2 for t < T, with their reference values.

    For the decaying families sum gamma_t must diverge and the ratio
    sum gamma_t^2 / sum gamma_t must vanish as T grows.
    """
    _, _, gamma = schedule_arrays(schedule, T)
    sum_gamma = math.fsum(gamma)
    sum_gamma_sq = math.fsum(gamma * gamma)
    law = _gamma_law(schedule)
    if law is None:
        ref_gamma, ref_gamma_sq = sum_gamma, sum_gamma_sq
    else:
        scale, a = law
        ref_gamma = scale * _power_sum(a, T)
        ref_gamma_sq = scale * scale * _power_sum(2.0 * a, T)
    return LearningRateReport(T, sum_gamma, sum_gamma_sq, ref_gamma, ref_gamma_sq)


@dataclass(frozen=True)
class AlphaDeltaFit:
    """
    Fit of |alpha_t| <= delta gamma_t^2 <= Q over t < T.

    Attributes:
        delta: max_t |eta_t - eta_{t+1}| / gamma_t^2
        Q: max_t delta gamma_t^2
        max_alpha: max_t |eta_t - eta_{t+1}|
    """
    delta: float
    Q: float
    max_alpha: float


def fit_alpha_delta(schedule: Schedule, T: int) -> AlphaDeltaFit:
    """Smallest delta with |eta_t - eta_{t+1}| <= delta gamma_t^2 for t < T."""
    eta, _, gamma = schedule_arrays(schedule, T + 1)
    alpha = np.abs(eta[:-1] - eta[1:])
    gamma_sq = gamma[:-1] ** 2
    delta = float(np.max(alpha / gamma_sq))
    return AlphaDeltaFit(delta=delta, Q=float(delta * np.max(gamma_sq)), max_alpha=float(np.max(alpha)))
