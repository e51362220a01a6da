"""
Run configuration for a single simulated M-DSGD experiment.
"""
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np

from ..compress.spec import CompressorSpec
from ..core.schedule import Schedule
from ..exceptions import ConfigurationError


class Variant(str, Enum):
    """Update-rule variants"""
    MDSGD = "mdsgd"
    MEMORY_SCALED = "memory_scaled"
    FACTOR_MASKING = "factor_masking"
    DENSE_DSGD = "dense_dsgd"


@dataclass(frozen=True)
class ProblemSpec:
    """
    Synthetic problem description.

    Attributes:
        name: quadratic | logistic | phaseret
        d: Dimension
        n: Number of samples
        data_seed: Seed for data generation
        noise: Problem-specific noise level (zeta spread, label-flip rate,
            or measurement noise)
        mu: Smallest Lambda entry (quadratic)
        L: Largest Lambda entry (quadratic)
        reg: l2 coefficient (logistic)
    """
    name: str
    d: int
    n: int
    data_seed: int = 0
    noise: Optional[float] = None
    mu: float = 1.0
    L: float = 1.0
    reg: float = 0.1


@dataclass(frozen=True)
class RunConfig:
    """
    Everything needed to reproduce one run.

    Attributes:
        problem: Problem description
        p: Worker count
        b: Per-worker batch size
        schedule: Learning-rate schedule (carries beta)
        compressor: Mask strategy
        variant: Update rule
        T: Iteration count (0 gives a single t=0 row)
        run_seed: Seed for worker streams
        n_diag: Diagnostics cadence
        threads: Worker-pool size; never changes results
        check_invariants: Raise when the transformation identity fails
        w0: Optional explicit initial point
    """
    problem: ProblemSpec
    schedule: Schedule
    p: int = 4
    b: int = 8
    compressor: CompressorSpec = field(default_factory=CompressorSpec.dense)
    variant: Variant = Variant.MDSGD
    T: int = 1000
    run_seed: int = 0
    n_diag: int = 10
    threads: int = 1
    check_invariants: bool = False
    w0: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.p < 1:
            raise ConfigurationError(f"p must be at least 1, got {self.p}")
        if self.b < 1:
            raise ConfigurationError(f"b must be at least 1, got {self.b}")
        if self.T < 0:
            raise ConfigurationError(f"T must be non-negative, got {self.T}")
        if self.n_diag < 1:
            raise ConfigurationError(f"n_diag must be at least 1, got {self.n_diag}")
        if self.threads < 1:
            raise ConfigurationError(f"threads must be at least 1, got {self.threads}")
        if self.run_seed < 0:
            raise ConfigurationError(f"run_seed must be non-negative, got {self.run_seed}")
        if self.variant == Variant.MEMORY_SCALED and self.schedule.beta != 0.0:
            raise ConfigurationError("memory_scaled is defined for beta = 0 only")

    @property
    def beta(self) -> float:
        return self.schedule.beta

    def with_overrides(self, **changes) -> "RunConfig":
        """Copy with some fields replaced (validation re-runs)."""
        return replace(self, **changes)
