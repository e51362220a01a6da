"""
Diagonal quadratic: f(w; zeta_i) = 1/2 (w - zeta_i)^T Lambda (w - zeta_i).
"""
import numpy as np

from ..core.rng import data_rng
from ..core.vectors import ParamVector, as_param_vector
from ..exceptions import ProblemError
from .oracle import ProblemMetadata, ProblemOracle


class QuadraticProblem(ProblemOracle):
    """
    Strongly convex quadratic with closed-form optimum.

    w_star is the mean of the zeta_i and F_star = F(w_star).
    """

    def __init__(self, zeta: np.ndarray, lam: np.ndarray, data_seed: int = 0, name: str = "quadratic"):
        """
        Args:
            zeta: Data points, shape (n, d)
            lam: Diagonal of Lambda, shape (d,), entries > 0
            data_seed: Seed the data came from (recorded for G_est sampling)
            name: Problem name
        """
        zeta = np.array(zeta, dtype=np.float64)
        lam = as_param_vector(lam)
        if zeta.ndim != 2 or zeta.shape[1] != lam.shape[0]:
            raise ProblemError(f"zeta must have shape (n, {lam.shape[0]}), got {zeta.shape}")
        if np.any(lam <= 0.0):
            raise ProblemError("Lambda entries must be positive")
        n, d = zeta.shape
        super().__init__(
            name=name,
            d=d,
            n=n,
            metadata=ProblemMetadata(L=float(lam.max()), mu=float(lam.min()), c=0.0),
            data_seed=data_seed,
        )
        self._zeta = zeta
        self._lam = lam
        self.w_star = zeta.mean(axis=0)
        self.F_star = self.full_objective(self.w_star)

    @classmethod
    def generate(
        cls,
        d: int,
        n: int,
        data_seed: int = 0,
        mu: float = 1.0,
        L: float = 1.0,
        noise: float = 1.0,
    ) -> "QuadraticProblem":
        """
        Draw zeta_i = m + noise * N(0, I) around a random center m, with
        Lambda spread evenly over [mu, L].
        """
        if d < 1 or n < 1:
            raise ProblemError(f"quadratic needs d >= 1 and n >= 1, got d={d}, n={n}")
        if not 0.0 < mu <= L:
            raise ProblemError(f"quadratic needs 0 < mu <= L, got mu={mu}, L={L}")
        rng = data_rng(data_seed)
        center = rng.standard_normal(d)
        zeta = center + noise * rng.standard_normal((n, d))
        lam = np.linspace(mu, L, d) if d > 1 else np.array([L], dtype=np.float64)
        return cls(zeta, lam, data_seed=data_seed)

    def per_sample_losses(self, w: ParamVector, batch: np.ndarray) -> np.ndarray:
        diff = w - self._zeta[batch]
        return 0.5 * np.sum(self._lam * diff * diff, axis=1)

    def per_sample_gradients(self, w: ParamVector, batch: np.ndarray) -> np.ndarray:
        return self._lam * (w - self._zeta[batch])

    def suboptimality(self, w: ParamVector) -> float:
        """Closed form 1/2 (w - w_star)^T Lambda (w - w_star); O(d) instead of O(n d)."""
        self._check_point(w)
        diff = w - self.w_star
        return 0.5 * float(np.sum(self._lam * diff * diff))
