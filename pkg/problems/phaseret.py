"""
Robust phase retrieval: f(w; a_i, y_i) = |(a_i^T w)^2 - y_i|.

Weakly convex and nonsmooth, with c = 2 max_i ||a_i||^2.
"""
import numpy as np

from ..core.rng import data_rng
from ..core.vectors import ParamVector
from ..exceptions import ProblemError
from .oracle import ProblemMetadata, ProblemOracle


class PhaseRetrievalProblem(ProblemOracle):
    """
    Measurements y_i = (a_i^T w_nat)^2 + noise * N(0, 1) from a planted unit
    vector w_nat. With noise = 0, w_star = w_nat and F_star = 0.

    Runs start in the local regime, START_DISTANCE away from w_nat along a
    random direction drawn from the data seed.
    """

    START_DISTANCE = 0.01

    def __init__(
        self,
        features: np.ndarray,
        measurements: np.ndarray,
        planted: np.ndarray,
        noise: float,
        data_seed: int = 0,
    ):
        features = np.asarray(features, dtype=np.float64)
        measurements = np.asarray(measurements, dtype=np.float64)
        if features.ndim != 2 or measurements.shape != (features.shape[0],):
            raise ProblemError("features must be (n, d) and measurements (n,)")
        n, d = features.shape
        c = 2.0 * float(np.max(np.sum(features * features, axis=1)))
        super().__init__(
            name="phaseret",
            d=d,
            n=n,
            metadata=ProblemMetadata(L=None, mu=0.0, c=c),
            data_seed=data_seed,
        )
        self._A = features
        self._y = measurements
        self.planted = np.array(planted, dtype=np.float64)
        self.noise = noise
        self._start = self._draw_start()
        if noise == 0.0:
            self.w_star = self.planted.copy()
            self.F_star = 0.0

    @classmethod
    def generate(cls, d: int, n: int, data_seed: int = 0, noise: float = 0.0) -> "PhaseRetrievalProblem":
        """Features a_i ~ N(0, I/d) so that ||a_i||^2 is about 1."""
        if d < 1 or n < 1:
            raise ProblemError(f"phaseret needs d >= 1 and n >= 1, got d={d}, n={n}")
        if noise < 0.0:
            raise ProblemError(f"phaseret noise must be non-negative, got {noise}")
        rng = data_rng(data_seed)
        features = rng.standard_normal((n, d)) / np.sqrt(d)
        planted = rng.standard_normal(d)
        planted /= np.linalg.norm(planted)
        # Same product as the full evaluation path, so F(w_nat) is exactly 0 when noise = 0
        products = features @ planted
        measurements = products * products
        if noise > 0.0:
            measurements = measurements + noise * rng.standard_normal(n)
        return cls(features, measurements, planted, noise=noise, data_seed=data_seed)

    def _draw_start(self) -> ParamVector:
        rng = data_rng(self.data_seed + 1)
        direction = rng.standard_normal(self.d)
        return self.planted + self.START_DISTANCE * direction / np.linalg.norm(direction)

    def initial_point(self) -> ParamVector:
        """w_nat plus a START_DISTANCE step along a seeded random direction."""
        return self._start.copy()

    def _products(self, w: ParamVector, batch: np.ndarray) -> np.ndarray:
        if batch.shape[0] == self.n and np.array_equal(batch, self._all_indices):
            return self._A @ w
        return self._A[batch] @ w

    def per_sample_losses(self, w: ParamVector, batch: np.ndarray) -> np.ndarray:
        products = self._products(w, batch)
        return np.abs(products * products - self._y[batch])

    def per_sample_gradients(self, w: ParamVector, batch: np.ndarray) -> np.ndarray:
        products = self._products(w, batch)
        # np.sign(0) == 0 picks the zero subgradient at kinks
        signs = np.sign(products * products - self._y[batch])
        return (signs * 2.0 * products)[:, None] * self._A[batch]
