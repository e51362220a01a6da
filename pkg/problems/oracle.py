"""
Finite-sum problem oracles.

F(w) = (1/n) sum_i f(w; zeta_i). Subclasses implement per-sample losses and
gradients; batch, full and stochastic evaluations are derived here so every
problem shares the same averaging code.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Union

import numpy as np

from ..core.rng import data_rng, derive_seed
from ..core.vectors import ParamVector, norm
from ..exceptions import DimensionMismatchError, ProblemError

BatchLike = Union[np.ndarray, Sequence[int]]

# Number of sampled points used for the empirical gradient bound
G_EST_SAMPLES = 1000


@dataclass(frozen=True)
class ProblemMetadata:
    """
    Curvature metadata.

    Attributes:
        L: Smoothness constant, None for nonsmooth problems
        mu: Strong-convexity modulus (0 when not strongly convex)
        c: Weak-convexity modulus (0 when convex)
    """
    L: Optional[float]
    mu: float = 0.0
    c: float = 0.0


class ProblemOracle(ABC):
    """
    Base class for synthetic finite-sum objectives.

    Oracles are immutable after construction and safe for concurrent reads.
    """

    def __init__(
        self,
        name: str,
        d: int,
        n: int,
        metadata: ProblemMetadata,
        data_seed: int = 0,
    ):
        if d < 1 or n < 1:
            raise ProblemError(f"Problem '{name}' needs d >= 1 and n >= 1, got d={d}, n={n}")
        self.name = name
        self.d = d
        self.n = n
        self.metadata = metadata
        self.data_seed = data_seed
        self.w_star: Optional[ParamVector] = None
        self.F_star: Optional[float] = None

    @property
    def smooth(self) -> bool:
        """True when the objective has a smoothness constant."""
        return self.metadata.L is not None

    @abstractmethod
    def per_sample_losses(self, w: ParamVector, batch: np.ndarray) -> np.ndarray:
        """
        Evaluate f(w; zeta_i) for every i in ``batch``.

        Args:
            w: Point of dimension d
            batch: Validated int64 sample indices

        Returns:
            Array of shape (len(batch),)
        """
        pass

    @abstractmethod
    def per_sample_gradients(self, w: ParamVector, batch: np.ndarray) -> np.ndarray:
        """
        Evaluate (sub)gradients of f(w; zeta_i) for every i in ``batch``.

        Args:
            w: Point of dimension d
            batch: Validated int64 sample indices

        Returns:
            Array of shape (len(batch), d)
        """
        pass

    def initial_point(self) -> ParamVector:
        """Deterministic starting point w_0; the origin unless overridden."""
        return np.zeros(self.d, dtype=np.float64)

    def _check_point(self, w: ParamVector) -> None:
        if w.ndim != 1 or w.shape[0] != self.d:
            raise DimensionMismatchError(
                f"Point has shape {w.shape}, problem '{self.name}' has d={self.d}"
            )

    def _check_batch(self, batch: BatchLike) -> np.ndarray:
        idx = np.asarray(batch, dtype=np.int64)
        if idx.ndim != 1 or idx.shape[0] == 0:
            raise ProblemError("Batch must be a non-empty 1-D index set")
        if idx.min() < 0 or idx.max() >= self.n:
            raise ProblemError(f"Batch indices must lie in [0, {self.n})")
        return idx

    @cached_property
    def _all_indices(self) -> np.ndarray:
        return np.arange(self.n, dtype=np.int64)

    def stochastic_gradient(self, w: ParamVector, batch: BatchLike) -> ParamVector:
        """
        Mini-batch gradient (1/|batch|) sum_{i in batch} grad f(w; zeta_i).

        Raises:
            ProblemError: If the batch is empty or out of range
        """
        self._check_point(w)
        idx = self._check_batch(batch)
        return self.per_sample_gradients(w, idx).mean(axis=0)

    def batch_objective(self, w: ParamVector, batch: BatchLike) -> float:
        """Mini-batch loss (1/|batch|) sum_{i in batch} f(w; zeta_i)."""
        self._check_point(w)
        idx = self._check_batch(batch)
        return float(self.per_sample_losses(w, idx).mean())

    def full_objective(self, w: ParamVector) -> float:
        """Exact finite-sum average F(w)."""
        self._check_point(w)
        return float(self.per_sample_losses(w, self._all_indices).mean())

    def suboptimality(self, w: ParamVector) -> float:
        """
        F(w) - F_star.

        Raises:
            ProblemError: If F_star is unknown
        """
        if self.F_star is None:
            raise ProblemError(f"Problem '{self.name}' has no known F_star")
        return self.full_objective(w) - self.F_star

    def full_gradient(self, w: ParamVector) -> ParamVector:
        """Exact finite-sum average of per-sample gradients."""
        self._check_point(w)
        return self.per_sample_gradients(w, self._all_indices).mean(axis=0)

    def _bound_center_and_radius(self):
        w0 = self.initial_point()
        if self.w_star is not None:
            radius = 2.0 * norm(w0 - self.w_star)
            center = self.w_star
        else:
            radius = 2.0 * norm(w0) + 1.0
            center = w0
        return center, (radius if radius > 0.0 else 1.0)

    @cached_property
    def G_est(self) -> float:
        """
        Empirical stochastic-gradient bound.

        Max of ||grad f(w; zeta_i)|| over G_EST_SAMPLES points drawn uniformly
        from the ball of radius 2||w_0 - w_star|| around w_star, each paired
        with a uniformly drawn sample index.
        """
        rng = data_rng(derive_seed(self.data_seed, 0x47))
        center, radius = self._bound_center_and_radius()
        directions = rng.standard_normal((G_EST_SAMPLES, self.d))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        radii = radius * rng.random(G_EST_SAMPLES) ** (1.0 / self.d)
        points = center + directions * radii[:, None]
        samples = rng.integers(0, self.n, size=G_EST_SAMPLES)
        best = 0.0
        for w, i in zip(points, samples):
            g = self.per_sample_gradients(w, np.array([i], dtype=np.int64))[0]
            best = max(best, norm(g))
        return best

    def gradient_residual(self, w: ParamVector) -> float:
        """||grad F(w)||, handy for optimality checks."""
        return norm(self.full_gradient(w))

    def describe(self) -> str:
        m = self.metadata
        return (
            f"{self.name}(d={self.d}, n={self.n}, L={m.L}, mu={m.mu}, c={m.c}, "
            f"F_star={self.F_star})"
        )

    def estimate_gradient_bound(self) -> float:
        """Return G_est (computed once and cached)."""
        return self.G_est
