"""
The auxiliary sequence z_t and the transformation equation it satisfies:

    z_t     = w_t + rho_{t-1} * g_{t-1} - eta_t * u_t
    z_{t+1} = z_t - (eta_t - rho_t) * d_t + (eta_t - eta_{t+1}) * u_{t+1}

with g the aggregated momentum, u the aggregated memory and d_t the aggregated
mini-batch gradient.
"""
from dataclasses import dataclass

from ..core.vectors import ParamVector, check_same_dim, inf_norm


@dataclass(frozen=True)
class TransformRecord:
    """
    One step of the transformation equation.

    Attributes:
        t: Iteration
        z_t: Auxiliary point at t
        gamma_t: eta_t - rho_t
        d_t: Aggregated mini-batch gradient
        alpha_t: eta_t - eta_{t+1}
        e_t: Aggregated memory u_{t+1}
        residual: Infinity-norm residual of the equation
    """
    t: int
    z_t: ParamVector
    gamma_t: float
    d_t: ParamVector
    alpha_t: float
    e_t: ParamVector
    residual: float

    def relative_residual(self) -> float:
        """residual / (1 + ||z_t||_inf)."""
        return self.residual / (1.0 + inf_norm(self.z_t))


def build_z(
    w_t: ParamVector,
    g_tilde_prev: ParamVector,
    u_tilde_t: ParamVector,
    rho_prev: float,
    eta_t: float,
) -> ParamVector:
    """
    z_t = w_t + rho_{t-1} * g_{t-1} - eta_t * u_t.

    Raises:
        DimensionMismatchError: If the vectors differ in length
    """
    check_same_dim(w_t, g_tilde_prev, u_tilde_t)
    return w_t + rho_prev * g_tilde_prev - eta_t * u_tilde_t


def transform_residual(
    z_t: ParamVector,
    z_next: ParamVector,
    d_t: ParamVector,
    u_tilde_next: ParamVector,
    eta_t: float,
    eta_next: float,
    rho_t: float,
) -> float:
    """Infinity norm of z_{t+1} - z_t + (eta_t - rho_t) d_t - (eta_t - eta_{t+1}) u_{t+1}."""
    check_same_dim(z_t, z_next, d_t, u_tilde_next)
    gap = z_next - z_t + (eta_t - rho_t) * d_t - (eta_t - eta_next) * u_tilde_next
    return inf_norm(gap)


def transform_record(
    t: int,
    z_t: ParamVector,
    z_next: ParamVector,
    d_t: ParamVector,
    u_tilde_next: ParamVector,
    eta_t: float,
    eta_next: float,
    rho_t: float,
) -> TransformRecord:
    """Evaluate the transformation equation for one step and keep its terms."""
    residual = transform_residual(z_t, z_next, d_t, u_tilde_next, eta_t, eta_next, rho_t)
    return TransformRecord(
        t=t,
        z_t=z_t,
        gamma_t=eta_t - rho_t,
        d_t=d_t,
        alpha_t=eta_t - eta_next,
        e_t=u_tilde_next,
        residual=residual,
    )
