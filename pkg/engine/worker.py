"""
Per-worker update rule for every variant.
"""
from dataclasses import dataclass

import numpy as np

from ..config.run_config import Variant
from ..compress.masks import apply_mask
from ..core.masks import SparseMask
from ..core.state import WorkerState
from ..core.vectors import ParamVector, check_same_dim
from ..exceptions import ConfigurationError


@dataclass
class WorkerOutput:
    """
    What one worker hands to the aggregator.

    Attributes:
        send: Vector sent this iteration
        state: Worker state after the update
        momentum: Pre-mask momentum g_{t,k} (grad / p when beta = 0)
        scaled_grad: grad / p
        nnz: Coordinates sent
    """
    send: ParamVector
    state: WorkerState
    momentum: ParamVector
    scaled_grad: ParamVector
    nnz: int


def worker_step(
    state: WorkerState,
    grad: ParamVector,
    mask: SparseMask,
    variant: Variant,
    beta: float,
    eta_t: float,
    eta_next: float,
    p: int,
) -> WorkerOutput:
    """
    Apply one iteration of the worker update.

    mdsgd:          g = beta * g_prev + grad / p; send m*(g + u); u = (1 - m)*(g + u)
    factor_masking: as mdsgd, then the momentum buffer keeps only (1 - m)*g
    dense_dsgd:     send g; memory stays zero
    memory_scaled:  v-form with beta = 0; send m*(grad / p + u) and
                    u = (eta_t / eta_next) * (1 - m)*(grad / p + u)

    The aggregator multiplies the summed sends by eta_t for every variant.

    Args:
        state: Worker state (not modified)
        grad: Raw mini-batch average gradient of this worker
        mask: Mask for this iteration (ignored by dense_dsgd)
        variant: Update rule
        beta: Momentum scalar
        eta_t: Current step
        eta_next: Next step (memory_scaled only)
        p: Worker count

    Returns:
        WorkerOutput with a fresh WorkerState

    Raises:
        DimensionMismatchError: If vector sizes differ
        ConfigurationError: If memory_scaled is used with beta != 0
    """
    check_same_dim(state.momentum, state.memory, grad)
    scaled = grad / p

    if variant == Variant.MEMORY_SCALED:
        if beta != 0.0:
            raise ConfigurationError("memory_scaled is defined for beta = 0 only")
        send, residual = apply_mask(mask, scaled + state.memory)
        memory = (eta_t / eta_next) * residual
        new_state = WorkerState(np.zeros_like(scaled), memory, state.worker_id)
        return WorkerOutput(send, new_state, scaled, scaled, mask.cardinality)

    g = beta * state.momentum + scaled

    if variant == Variant.DENSE_DSGD:
        new_state = WorkerState(g, state.memory, state.worker_id)
        return WorkerOutput(g, new_state, g, scaled, g.shape[0])

    send, memory = apply_mask(mask, g + state.memory)
    if variant == Variant.FACTOR_MASKING:
        _, kept = apply_mask(mask, g)
        momentum = kept
    else:
        momentum = g
    new_state = WorkerState(momentum, memory, state.worker_id)
    return WorkerOutput(send, new_state, g, scaled, mask.cardinality)
