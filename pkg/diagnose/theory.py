"""
Constants and right-hand sides of the convergence bounds.

All formulas are evaluated verbatim from their closed forms; the callers decide
which empirical quantities to plug in.
"""
import math
from dataclasses import dataclass, fields
from enum import Enum
from typing import Optional, Tuple

from ..exceptions import ValidationError


class BoundKind(str, Enum):
    """Which rate bound to evaluate."""
    STRONG_CONVEX = "T3"
    CONVEX = "T4"
    NONCONVEX = "T5"


@dataclass(frozen=True)
class TheoryConstants:
    """
    Constants appearing in the bounds.

    Attributes:
        A: E||z_t - w_t||^2 <= A gamma_t^2
        B: Bound on ||z_t - w_star|| (or ||w_{s,t} - w_star|| for stagewise)
        U: Bound on ||u_t||
        Q: Bound on |alpha_t|
        D: Bound on ||d_t||
        E: Bound on ||e_t||
        delta: |alpha_t| <= delta gamma_t^2
        G: Stochastic-gradient bound
        L: Smoothness constant
        mu: Strong-convexity modulus
        c: Weak-convexity modulus
        F_upper: Upper bound on F(w_0) - F(w_star)
        beta: Momentum scalar
    """
    A: float = 0.0
    B: float = 0.0
    U: float = 0.0
    Q: float = 0.0
    D: float = 0.0
    E: float = 0.0
    delta: float = 0.0
    G: float = 0.0
    L: float = 0.0
    mu: float = 0.0
    c: float = 0.0
    F_upper: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not value >= 0.0 or not math.isfinite(value):
                raise ValidationError(f"TheoryConstants.{f.name} must be finite and >= 0, got {value}")
        if self.beta >= 1.0:
            raise ValidationError(f"beta must be in [0,1), got {self.beta}")


def _momentum_memory_term(G: float, U: float, beta: float, power: int) -> float:
    """sqrt(2 G^2 beta^2 / (1 - beta)^power + 2 U^2)."""
    return math.sqrt(2.0 * G * G * beta * beta / (1.0 - beta) ** power + 2.0 * U * U)


def _check_beta(beta: float) -> None:
    if not 0.0 <= beta < 1.0:
        raise ValidationError(f"beta must be in [0,1), got {beta}")


def theorem1_constant(consts: TheoryConstants) -> float:
    """C = L G sqrt(A) + G E delta + L (D^2 + E^2 Q delta)."""
    k = consts
    return k.L * k.G * math.sqrt(k.A) + k.G * k.E * k.delta + k.L * (k.D ** 2 + k.E ** 2 * k.Q * k.delta)


def strong_convex_constant(consts: TheoryConstants) -> float:
    """C = max{4G^2, 2LB sqrt(...) + 2 mu U B + 2G^2 + 2U^2}."""
    k = consts
    root = _momentum_memory_term(k.G, k.U, k.beta, 2)
    return max(4.0 * k.G ** 2, 2.0 * k.L * k.B * root + 2.0 * k.mu * k.U * k.B + 2.0 * k.G ** 2 + 2.0 * k.U ** 2)


def convex_constant(consts: TheoryConstants) -> float:
    """C = 2G sqrt(...) + 2UB + 2G^2 + 2U^2."""
    k = consts
    root = _momentum_memory_term(k.G, k.U, k.beta, 2)
    return 2.0 * k.G * root + 2.0 * k.U * k.B + 2.0 * k.G ** 2 + 2.0 * k.U ** 2


def nonconvex_constant(consts: TheoryConstants) -> float:
    """C = L G^2 beta/(1-beta)^3 + L G U/(1-beta) + L G^2 / (2 (1-beta)^2)."""
    k = consts
    one = 1.0 - k.beta
    return k.L * k.G ** 2 * k.beta / one ** 3 + k.L * k.G * k.U / one + k.L * k.G ** 2 / (2.0 * one ** 2)


def theorem_bound(kind: BoundKind, consts: TheoryConstants, T: int, eta: Optional[float] = None) -> float:
    """
    Right-hand side of a rate bound after T iterations.

    T3: tail-averaged suboptimality, (3C + 2G sqrt(...)) / (mu T)
    T4: suboptimality weighted by 2/sqrt(t+1),
        (B^2 + C sum 1/(t+1)) / (2 sum 1/sqrt(t+1)); B bounds ||w_0 - w_star||
    T5: average squared gradient norm, (1 - beta) ((F_upper) / (T eta) + C eta)
        with eta = 1/sqrt(T) unless given

    Raises:
        ValidationError: If T < 1 or T3 is asked for with mu = 0
    """
    kind = BoundKind(kind)
    if T < 1:
        raise ValidationError(f"T must be at least 1, got {T}")
    if kind == BoundKind.STRONG_CONVEX:
        if consts.mu <= 0.0:
            raise ValidationError("strong convex bound needs mu > 0")
        C = strong_convex_constant(consts)
        root = _momentum_memory_term(consts.G, consts.U, consts.beta, 2)
        return (3.0 * C + 2.0 * consts.G * root) / (consts.mu * T)
    if kind == BoundKind.CONVEX:
        C = convex_constant(consts)
        harmonic = math.fsum(1.0 / (t + 1) for t in range(T))
        weights = math.fsum(1.0 / math.sqrt(t + 1) for t in range(T))
        return (consts.B ** 2 + C * harmonic) / (2.0 * weights)
    step = 1.0 / math.sqrt(T) if eta is None else eta
    C = nonconvex_constant(consts)
    return (1.0 - consts.beta) * (consts.F_upper / (T * step) + C * step)


def lemma5_constant(G: float, U: float, beta: float) -> float:
    """C = G sqrt(2 G^2 beta^2 / (1-beta)^4 + 2 U^2) + G^2 / (2 - 2 beta)."""
    _check_beta(beta)
    return G * _momentum_memory_term(G, U, beta, 4) + G * G / (2.0 - 2.0 * beta)


def theorem6_constant(G: float, B: float, U: float, gamma: float, beta: float) -> Tuple[float, float]:
    """
    (C_hat, G_hat) with G_hat = sqrt(2 G^2 + 4 B^2 / gamma^2) and C_hat the
    one-stage constant evaluated at G_hat.

    Raises:
        ValidationError: If gamma <= 0 or beta is out of range
    """
    if not gamma > 0.0:
        raise ValidationError(f"gamma must be positive, got {gamma}")
    G_hat = math.sqrt(2.0 * G * G + 4.0 * B * B / (gamma * gamma))
    return lemma5_constant(G_hat, U, beta), G_hat


def theorem6_rhs(F_upper: float, F_star: float, C_hat: float, eta0: float, S: int) -> float:
    """(F - F_star + 3 C_hat eta0) / (S + 1)."""
    return (F_upper - F_star + 3.0 * C_hat * eta0) / (S + 1)
