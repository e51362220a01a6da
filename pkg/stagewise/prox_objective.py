"""
Prox-regularized stage objective F_{s,gamma}(w) = F(w) + ||w - center||^2 / (2 gamma).
"""
import numpy as np

from ..core.vectors import ParamVector, as_param_vector
from ..exceptions import ValidationError
from ..problems.oracle import ProblemMetadata, ProblemOracle


class ProxObjective(ProblemOracle):
    """
    Wraps an oracle and adds the proximal term to every per-sample loss.

    The wrapped objective is (1/gamma - c)-strongly convex when gamma < 1/c.
    """

    def __init__(self, base: ProblemOracle, center: ParamVector, gamma: float):
        if not gamma > 0.0:
            raise ValidationError(f"gamma must be positive, got {gamma}")
        base_meta = base.metadata
        L = None if base_meta.L is None else base_meta.L + 1.0 / gamma
        super().__init__(
            name=f"{base.name}+prox",
            d=base.d,
            n=base.n,
            metadata=ProblemMetadata(L=L, mu=1.0 / gamma - base_meta.c, c=0.0),
            data_seed=base.data_seed,
        )
        self.base = base
        self.center = as_param_vector(center, base.d)
        self.gamma = gamma

    def initial_point(self) -> ParamVector:
        """Stages start at their center."""
        return self.center.copy()

    def prox_term(self, w: ParamVector) -> float:
        diff = w - self.center
        return float(diff @ diff) / (2.0 * self.gamma)

    def per_sample_losses(self, w: ParamVector, batch: np.ndarray) -> np.ndarray:
        return self.base.per_sample_losses(w, batch) + self.prox_term(w)

    def per_sample_gradients(self, w: ParamVector, batch: np.ndarray) -> np.ndarray:
        return self.base.per_sample_gradients(w, batch) + ((w - self.center) / self.gamma)[None, :]


def prox_objective(oracle: ProblemOracle, center: ParamVector, gamma: float) -> ProxObjective:
    """
    Build F_{s,gamma} around ``center``.

    Raises:
        ValidationError: If gamma <= 0
    """
    return ProxObjective(oracle, center, gamma)
