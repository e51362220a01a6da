"""
Dense parameter vectors.

A ParamVector is a 1-D ``numpy.float64`` array of the problem dimension d.
Helpers here enforce the two invariants every module relies on: the length
never changes and every entry is finite.
"""
from typing import Iterable, Optional, Union

import numpy as np

from ..exceptions import DimensionMismatchError, NonFiniteError

ParamVector = np.ndarray

ArrayLike = Union[np.ndarray, Iterable[float]]


def as_param_vector(values: ArrayLike, d: Optional[int] = None) -> ParamVector:
    """
    Copy ``values`` into a fresh float64 ParamVector.

    Args:
        values: Sequence of real numbers
        d: Expected dimension (checked when given)

    Returns:
        1-D float64 array owning its data

    Raises:
        DimensionMismatchError: If the shape is not (d,)
        NonFiniteError: If any entry is NaN or Inf
    """
    v = np.array(values, dtype=np.float64, copy=True)
    if v.ndim != 1:
        raise DimensionMismatchError(f"ParamVector must be 1-D, got shape {v.shape}")
    if d is not None and v.shape[0] != d:
        raise DimensionMismatchError(f"ParamVector has length {v.shape[0]}, expected {d}")
    ensure_finite(v, "as_param_vector")
    return v


def zeros(d: int) -> ParamVector:
    """All-zero ParamVector of dimension d."""
    return np.zeros(d, dtype=np.float64)


def ensure_finite(
    v: np.ndarray,
    context: str,
    iteration: Optional[int] = None,
    worker_id: Optional[int] = None
) -> np.ndarray:
    """
    Raise NonFiniteError if ``v`` holds NaN or Inf.

    Args:
        v: Array to check
        context: Short description used in the error message
        iteration: Iteration index, reported when known
        worker_id: Worker index, reported when known

    Returns:
        ``v`` unchanged
    """
    if not np.all(np.isfinite(v)):
        where = []
        if iteration is not None:
            where.append(f"iteration={iteration}")
        if worker_id is not None:
            where.append(f"worker={worker_id}")
        suffix = f" ({', '.join(where)})" if where else ""
        raise NonFiniteError(
            f"Non-finite value in {context}{suffix}",
            iteration=iteration,
            worker_id=worker_id,
        )
    return v


def check_same_dim(*vectors: np.ndarray) -> int:
    """Return the common length of ``vectors`` or raise DimensionMismatchError."""
    dims = {v.shape[0] for v in vectors}
    if len(dims) != 1:
        raise DimensionMismatchError(f"Vectors have mismatched dimensions: {sorted(dims)}")
    return dims.pop()


def inf_norm(v: np.ndarray) -> float:
    """Max-abs norm; 0.0 for empty input."""
    if v.size == 0:
        return 0.0
    return float(np.max(np.abs(v)))


def norm(v: np.ndarray) -> float:
    """Euclidean norm."""
    return float(np.linalg.norm(v))
