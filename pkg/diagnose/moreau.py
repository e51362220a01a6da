"""
Moreau-envelope gradient estimates.

grad F_gamma(w) = (w - prox(w)) / gamma with
prox(w) = argmin_{w'} F(w') + ||w' - w||^2 / (2 gamma). The inner problem is
(1/gamma - c)-strongly convex when gamma < 1/c.
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..config.logging_config import logger
from ..config.settings import settings
from ..core.vectors import ParamVector, as_param_vector, norm
from ..exceptions import ProxSolveError, ValidationError
from ..problems.oracle import ProblemOracle

# How often the subgradient method certifies its running average
_CERTIFICATE_EVERY = 50


@dataclass(frozen=True)
class MoreauEstimate:
    """
    Attributes:
        grad: (w - prox point) / gamma
        norm: ||grad||
        prox_point: Approximate minimizer of the inner problem
        inner_norm: Upper bound on mu ||prox_point - prox||, mu the strong convexity
            of the inner problem; the inner gradient norm for smooth problems
        iterations: Inner iterations used
        converged: Whether inner_norm reached the tolerance
    """
    grad: ParamVector
    norm: float
    prox_point: ParamVector
    inner_norm: float
    iterations: int
    converged: bool

    @property
    def norm_sq(self) -> float:
        return self.norm * self.norm


def _inner_gradient(oracle: ProblemOracle, x: ParamVector, center: ParamVector, gamma: float) -> ParamVector:
    return oracle.full_gradient(x) + (x - center) / gamma


def _inner_objective(oracle: ProblemOracle, x: ParamVector, center: ParamVector, gamma: float) -> float:
    offset = x - center
    return oracle.full_objective(x) + float(offset @ offset) / (2.0 * gamma)


def _solve_smooth(oracle, center, gamma, tol, max_iter):
    step = 1.0 / (1.0 / gamma + oracle.metadata.L)
    x = center.copy()
    g = _inner_gradient(oracle, x, center, gamma)
    g_norm = norm(g)
    k = 0
    while g_norm > tol and k < max_iter:
        x = x - step * g
        g = _inner_gradient(oracle, x, center, gamma)
        g_norm = norm(g)
        k += 1
    return x, g_norm, k


class _LowerModel:
    """
    (k+1)-weighted aggregate of the lower models
    psi(x_k) + g_k^T (y - x_k) + mu/2 ||y - x_k||^2, in coordinates relative to the center.
    """

    def __init__(self, d: int, mu: float):
        self.mu = mu
        self.weight_sum = 0.0
        self.const_sum = 0.0
        self.lin_sum = np.zeros(d)

    def add(self, weight: float, offset: ParamVector, psi: float, g: ParamVector) -> None:
        self.weight_sum += weight
        self.const_sum += weight * (psi - float(g @ offset) + 0.5 * self.mu * float(offset @ offset))
        self.lin_sum = self.lin_sum + weight * (g - self.mu * offset)

    def minimum(self) -> float:
        W = self.weight_sum
        return self.const_sum / W - float(self.lin_sum @ self.lin_sum) / (2.0 * self.mu * W * W)

    def distance_bound(self, psi_at_point: float) -> float:
        """Upper bound on mu ||point - prox||."""
        gap = max(psi_at_point - self.minimum(), 0.0)
        return math.sqrt(2.0 * self.mu * gap)


def _solve_nonsmooth(oracle, center, gamma, tol, max_iter, mu_inner):
    # Averaged subgradient method. The returned norm bounds mu ||x - prox||:
    # either a subgradient norm or the gap certificate of the weighted average.
    x = center.copy()
    g = _inner_gradient(oracle, x, center, gamma)
    g_norm = norm(g)
    if g_norm <= tol:
        return x, g_norm, 0

    best_x, best_norm = x.copy(), g_norm
    model = _LowerModel(oracle.d, mu_inner)
    average = center.copy()
    bound = math.inf
    k = 0
    while k < max_iter:
        weight = k + 1.0
        model.add(weight, x - center, _inner_objective(oracle, x, center, gamma), g)
        average = average + (weight / model.weight_sum) * (x - average)

        step = min(gamma, 2.0 / (mu_inner * (k + 2)))
        x = x - step * g
        k += 1
        g = _inner_gradient(oracle, x, center, gamma)
        g_norm = norm(g)
        if g_norm < best_norm:
            best_x, best_norm = x.copy(), g_norm
            if best_norm <= tol:
                return best_x, best_norm, k
        if k % _CERTIFICATE_EVERY == 0 or k == max_iter:
            bound = model.distance_bound(_inner_objective(oracle, average, center, gamma))
            if bound <= tol:
                break

    if best_norm < bound:
        return best_x, best_norm, k
    return average, bound, k


def moreau_grad_estimate(
    oracle: ProblemOracle,
    w_tilde: ParamVector,
    gamma: float,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    raise_on_failure: bool = True,
) -> MoreauEstimate:
    """
    Estimate the gradient of the Moreau envelope F_gamma at ``w_tilde``.

    Smooth oracles use fixed-step gradient descent with step
    1 / (1/gamma + L); nonsmooth ones use the averaged subgradient method and
    certify its weighted average with an aggregated strongly convex lower model.

    Args:
        oracle: Objective F
        w_tilde: Point at which to evaluate grad F_gamma
        gamma: Envelope parameter, 0 < gamma < 1/c
        tol: Tolerance on the inner_norm bound (settings.PROX_TOL by default)
        max_iter: Inner iteration cap (settings.PROX_MAX_ITER by default)
        raise_on_failure: Raise when the tolerance is not met; otherwise log a
            warning and return the best estimate

    Returns:
        MoreauEstimate

    Raises:
        ValidationError: If gamma is out of range
        ProxSolveError: If the inner solve misses the tolerance and
            raise_on_failure is set
    """
    tol = settings.PROX_TOL if tol is None else tol
    max_iter = settings.PROX_MAX_ITER if max_iter is None else max_iter
    c = oracle.metadata.c
    if not gamma > 0.0 or (c > 0.0 and not gamma < 1.0 / c):
        raise ValidationError(f"gamma must lie in (0, 1/c) with c={c}, got {gamma}")
    center = as_param_vector(w_tilde, oracle.d)

    if oracle.smooth:
        prox_point, inner_norm, iterations = _solve_smooth(oracle, center, gamma, tol, max_iter)
    else:
        mu_inner = 1.0 / gamma - c
        prox_point, inner_norm, iterations = _solve_nonsmooth(
            oracle, center, gamma, tol, max_iter, mu_inner
        )

    converged = inner_norm <= tol
    if not converged:
        message = (
            f"Prox solve on '{oracle.name}' reached inner norm {inner_norm:.3e} "
            f"after {iterations} iterations (tol {tol:.1e})"
        )
        if raise_on_failure:
            raise ProxSolveError(message, achieved_norm=inner_norm, iterations=iterations)
        logger.warning(message)

    grad = (center - prox_point) / gamma
    return MoreauEstimate(
        grad=grad,
        norm=norm(grad),
        prox_point=prox_point,
        inner_norm=inner_norm,
        iterations=iterations,
        converged=converged,
    )
