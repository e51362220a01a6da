"""
Sparse communication: mask strategies and the memory-norm bound.
"""

from .spec import CompressorKind, CompressorSpec
from .masks import top_k_mask, random_k_mask, apply_mask, memory_norm_bound, top_k_share_check
from .compressors import (
    Compressor,
    DenseCompressor,
    TopKCompressor,
    RandomKCompressor,
    make_compressor,
)

__all__ = [
    "CompressorKind",
    "CompressorSpec",
    "top_k_mask",
    "random_k_mask",
    "apply_mask",
    "memory_norm_bound",
    "top_k_share_check",
    "Compressor",
    "DenseCompressor",
    "TopKCompressor",
    "RandomKCompressor",
    "make_compressor",
]
