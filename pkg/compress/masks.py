"""
Mask generation and application.
"""
from typing import Tuple

import numpy as np

from ..core.masks import SparseMask
from ..core.vectors import ParamVector
from ..exceptions import CompressorError, DimensionMismatchError


def _check_q(d: int, q: int) -> None:
    if not 1 <= q <= d:
        raise CompressorError(f"q must be in [1, {d}], got {q}")


def top_k_mask(v: ParamVector, q: int) -> SparseMask:
    """
    Select the q coordinates of largest magnitude.

    Ties are broken by lower index first.

    Args:
        v: Vector to rank
        q: Number of coordinates to keep

    Returns:
        SparseMask with exactly q entries

    Raises:
        CompressorError: If q is not in [1, d]
    """
    d = v.shape[0]
    _check_q(d, q)
    if q == d:
        return SparseMask.dense(d)
    # stable sort keeps index order within equal magnitudes
    order = np.argsort(-np.abs(v), kind="stable")
    return SparseMask(np.sort(order[:q]), d)


def random_k_mask(stream: np.random.Generator, d: int, q: int) -> SparseMask:
    """
    Uniformly random q-subset of [0, d) drawn from ``stream``.

    The stream is not touched when q = d.

    Raises:
        CompressorError: If q is not in [1, d]
    """
    _check_q(d, q)
    if q == d:
        return SparseMask.dense(d)
    chosen = stream.choice(d, size=q, replace=False)
    return SparseMask(np.sort(chosen).astype(np.int64), d)


def apply_mask(mask: SparseMask, v: ParamVector) -> Tuple[ParamVector, ParamVector]:
    """
    Split ``v`` into the sent part m*v and the residual (1-m)*v.

    Both outputs are fresh arrays and sent + residual == v exactly.

    Raises:
        DimensionMismatchError: If mask.d != len(v)
    """
    if mask.d != v.shape[0]:
        raise DimensionMismatchError(f"Mask has d={mask.d}, vector has length {v.shape[0]}")
    sent = np.zeros_like(v)
    sent[mask.selected] = v[mask.selected]
    residual = v.copy()
    residual[mask.selected] = 0.0
    return sent, residual


def memory_norm_bound(d: int, q: int, G: float, beta: float) -> float:
    """
    Upper bound on the squared norm of the aggregated memory gradient:
    2(d-q)(2d+q)G^2 / ((1-beta)^2 q^2).

    The bound does not depend on the worker count.

    Raises:
        CompressorError: If q, G or beta are out of range
    """
    _check_q(d, q)
    if not 0.0 <= beta < 1.0:
        raise CompressorError(f"beta must be in [0,1), got {beta}")
    if not G > 0.0:
        raise CompressorError(f"G must be positive, got {G}")
    return 2.0 * (d - q) * (2 * d + q) * G * G / ((1.0 - beta) ** 2 * q * q)


def top_k_share_check(v: ParamVector, q: int) -> bool:
    """True when the top-q part of v carries at least a q/d share of ||v||^2."""
    d = v.shape[0]
    sent, _ = apply_mask(top_k_mask(v, q), v)
    total = float(v @ v)
    return float(sent @ sent) >= (q / d) * total * (1.0 - 1e-12)
