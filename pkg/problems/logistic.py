"""
l2-regularized binary logistic regression on Gaussian data with a planted
separator.
"""
from typing import Optional

import numpy as np
from scipy.special import expit

from ..config.logging_config import logger
from ..core.rng import data_rng
from ..core.vectors import ParamVector, norm
from ..exceptions import NumericalError, ProblemError
from .oracle import ProblemMetadata, ProblemOracle

SOLVE_TOL = 1e-10
SOLVE_MAX_ITER = 200


class LogisticProblem(ProblemOracle):
    """
    f(w; a_i, y_i) = log(1 + exp(-y_i a_i^T w)) + (reg/2) ||w||^2, y_i in {-1, +1}.

    mu = reg, L = ||A||_2^2 / (4n) + reg. The optimum is computed once by a
    damped Newton solve to ||grad F|| <= 1e-10.
    """

    def __init__(self, features: np.ndarray, labels: np.ndarray, reg: float, data_seed: int = 0):
        features = np.array(features, dtype=np.float64)
        labels = np.array(labels, dtype=np.float64)
        if features.ndim != 2 or labels.shape != (features.shape[0],):
            raise ProblemError("features must be (n, d) and labels (n,)")
        if not reg > 0.0:
            raise ProblemError(f"logistic needs reg > 0, got {reg}")
        n, d = features.shape
        spectral = float(np.linalg.norm(features, 2)) ** 2
        super().__init__(
            name="logistic",
            d=d,
            n=n,
            metadata=ProblemMetadata(L=spectral / (4.0 * n) + reg, mu=reg, c=0.0),
            data_seed=data_seed,
        )
        self._A = features
        self._y = labels
        self.reg = reg
        self.w_star = self.solve_optimum()
        self.F_star = self.full_objective(self.w_star)

    @classmethod
    def generate(
        cls,
        d: int,
        n: int,
        data_seed: int = 0,
        reg: float = 0.1,
        noise: float = 0.1,
    ) -> "LogisticProblem":
        """
        Gaussian features, labels from a planted separator with each label
        flipped independently with probability ``noise``.
        """
        if d < 1 or n < 1:
            raise ProblemError(f"logistic needs d >= 1 and n >= 1, got d={d}, n={n}")
        if not 0.0 <= noise <= 0.5:
            raise ProblemError(f"logistic label noise must be in [0, 0.5], got {noise}")
        rng = data_rng(data_seed)
        features = rng.standard_normal((n, d))
        separator = rng.standard_normal(d)
        labels = np.where(features @ separator >= 0.0, 1.0, -1.0)
        flips = rng.random(n) < noise
        labels[flips] = -labels[flips]
        return cls(features, labels, reg=reg, data_seed=data_seed)

    def _margins(self, w: ParamVector, batch: np.ndarray) -> np.ndarray:
        return self._y[batch] * (self._A[batch] @ w)

    def per_sample_losses(self, w: ParamVector, batch: np.ndarray) -> np.ndarray:
        margins = self._margins(w, batch)
        return np.logaddexp(0.0, -margins) + 0.5 * self.reg * float(w @ w)

    def per_sample_gradients(self, w: ParamVector, batch: np.ndarray) -> np.ndarray:
        margins = self._margins(w, batch)
        weights = -self._y[batch] * expit(-margins)
        return weights[:, None] * self._A[batch] + self.reg * w

    def _hessian(self, w: ParamVector) -> np.ndarray:
        s = expit(self._A @ w)
        curvature = s * (1.0 - s)
        return (self._A.T * curvature) @ self._A / self.n + self.reg * np.eye(self.d)

    def solve_optimum(self, w_start: Optional[ParamVector] = None) -> ParamVector:
        """
        Damped Newton solve for argmin F.

        Args:
            w_start: Starting point (origin when None)

        Returns:
            Point with ||grad F|| <= 1e-10

        Raises:
            NumericalError: If the tolerance is not met within the iteration cap
        """
        w = np.zeros(self.d) if w_start is None else np.array(w_start, dtype=np.float64)
        for iteration in range(SOLVE_MAX_ITER):
            grad = self.full_gradient(w)
            grad_norm = norm(grad)
            if grad_norm <= SOLVE_TOL:
                logger.debug(f"logistic optimum solved in {iteration} Newton steps (|grad|={grad_norm:.3e})")
                return w
            direction = np.linalg.solve(self._hessian(w), grad)
            value = self.full_objective(w)
            slope = float(grad @ direction)
            step = 1.0
            # Armijo backtracking; the floor on step keeps the last iterations exact
            while step > 1e-12:
                candidate = w - step * direction
                if self.full_objective(candidate) <= value - 1e-4 * step * slope:
                    break
                step *= 0.5
            w = w - step * direction
        raise NumericalError(
            f"logistic Newton solve did not reach |grad| <= {SOLVE_TOL} in {SOLVE_MAX_ITER} steps"
        )
