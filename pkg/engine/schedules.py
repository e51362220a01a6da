"""
Closed-form (eta_t, rho_t, gamma_t) for each schedule family.

Every family uses the shifted index s = t + 1 so decaying schedules are defined
at t = 0. rho_t is taken from the stable solution of the momentum recurrence
beta * rho_t = beta * eta_t + rho_{t-1}, and gamma_t = eta_t - rho_t.
"""
import math
from typing import Tuple

import numpy as np

from ..core.schedule import Schedule, ScheduleFamily
from ..exceptions import ScheduleError


def _power_params(schedule: Schedule) -> Tuple[float, float]:
    """(eta0, alpha) for the families that share the power form."""
    family = schedule.family
    if family == ScheduleFamily.POWER:
        return schedule.eta0, schedule.alpha
    if family == ScheduleFamily.STRONG_CONVEX:
        return 1.0 / schedule.mu, 1.0
    if family == ScheduleFamily.CONVEX_SQRT:
        return schedule.eta0, 0.5
    raise ScheduleError(f"{family.value} is not a decaying schedule")


def _base_step(schedule: Schedule) -> float:
    if schedule.family == ScheduleFamily.CONSTANT:
        return schedule.eta0 / math.sqrt(schedule.horizon)
    return schedule.eta0


def _is_flat(schedule: Schedule) -> bool:
    return schedule.family in (ScheduleFamily.CONSTANT, ScheduleFamily.STAGE_CONSTANT)


def _eta(schedule: Schedule, t: int) -> float:
    beta = schedule.beta
    if _is_flat(schedule):
        return _base_step(schedule)
    eta0, alpha = _power_params(schedule)
    s = t + 1
    return eta0 * (1.0 / s ** alpha - beta / (s + 1) ** alpha)


def _rho(schedule: Schedule, t: int) -> float:
    beta = schedule.beta
    if _is_flat(schedule):
        eta = _base_step(schedule)
        # + 0.0 turns the beta = 0 case into +0.0 instead of -0.0
        return beta * eta / (beta - 1.0) + 0.0
    eta0, alpha = _power_params(schedule)
    s = t + 1
    return -eta0 * beta / (s + 1) ** alpha + 0.0


def schedule_eval(schedule: Schedule, t: int) -> Tuple[float, float, float]:
    """
    Evaluate the schedule at iteration t.

    Args:
        schedule: Schedule parameters
        t: Iteration index, >= 0

    Returns:
        (eta_t, rho_t, gamma_t) with gamma_t = eta_t - rho_t

    Raises:
        ScheduleError: If t is negative
    """
    if t < 0:
        raise ScheduleError(f"t must be non-negative, got {t}")
    eta = _eta(schedule, t)
    rho = _rho(schedule, t)
    return eta, rho, eta - rho


def rho_prev(schedule: Schedule, t: int) -> float:
    """rho_{t-1}; defined at t = 0 by the same closed form."""
    if t < 0:
        raise ScheduleError(f"t must be non-negative, got {t}")
    return _rho(schedule, t - 1)


def eta_at(schedule: Schedule, t: int) -> float:
    """eta_t alone."""
    if t < 0:
        raise ScheduleError(f"t must be non-negative, got {t}")
    return _eta(schedule, t)


def schedule_arrays(schedule: Schedule, T: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Vectorized (eta, rho, gamma) for t = 0..T-1.

    Used by diagnostics over long horizons; the engine itself uses
    ``schedule_eval``.
    """
    if T < 1:
        raise ScheduleError(f"T must be at least 1, got {T}")
    beta = schedule.beta
    if _is_flat(schedule):
        eta = np.full(T, _base_step(schedule))
        rho = np.full(T, beta * _base_step(schedule) / (beta - 1.0) + 0.0)
    else:
        eta0, alpha = _power_params(schedule)
        s = np.arange(1, T + 1, dtype=np.float64)
        eta = eta0 * (1.0 / s ** alpha - beta / (s + 1.0) ** alpha)
        rho = -eta0 * beta / (s + 1.0) ** alpha + 0.0
    return eta, rho, eta - rho
