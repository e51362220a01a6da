"""
Learning-rate schedule description.

Only the parameters live here; closed-form evaluation is in
``memsgd.engine.schedules``.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from ..exceptions import ScheduleError


class ScheduleFamily(str, Enum):
    """Closed-form (eta, rho, gamma) families."""
    CONSTANT = "constant"
    POWER = "power"
    STRONG_CONVEX = "strong_convex"
    CONVEX_SQRT = "convex_sqrt"
    STAGE_CONSTANT = "stage_constant"


@dataclass(frozen=True)
class Schedule:
    """
    Parameters of one schedule family.

    Attributes:
        family: Schedule family
        beta: Momentum scalar in [0, 1)
        eta0: Base step (constant, power, stage_constant)
        alpha: Decay exponent in [0.5, 1] (power only)
        mu: Strong-convexity modulus (strong_convex only)
        horizon: Iteration count T (constant only)
    """
    family: ScheduleFamily
    beta: float = 0.0
    eta0: float = 1.0
    alpha: Optional[float] = None
    mu: Optional[float] = None
    horizon: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "family", ScheduleFamily(self.family))
        if not 0.0 <= self.beta < 1.0:
            raise ScheduleError(f"beta must be in [0,1), got {self.beta}")
        if not self.eta0 > 0.0:
            raise ScheduleError(f"eta0 must be positive, got {self.eta0}")
        if self.family == ScheduleFamily.POWER:
            if self.alpha is None or not 0.5 <= self.alpha <= 1.0:
                raise ScheduleError(f"power schedule needs alpha in [0.5, 1], got {self.alpha}")
        if self.family == ScheduleFamily.STRONG_CONVEX:
            if self.mu is None or not self.mu > 0.0:
                raise ScheduleError(f"strong_convex schedule needs mu > 0, got {self.mu}")
        if self.family == ScheduleFamily.CONSTANT:
            if self.horizon is None or self.horizon < 1:
                raise ScheduleError(f"constant schedule needs horizon T >= 1, got {self.horizon}")

    def with_beta(self, beta: float) -> "Schedule":
        """Copy of this schedule with a different momentum scalar."""
        return Schedule(
            family=self.family,
            beta=beta,
            eta0=self.eta0,
            alpha=self.alpha,
            mu=self.mu,
            horizon=self.horizon,
        )
