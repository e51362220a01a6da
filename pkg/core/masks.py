"""
Sparse coordinate masks (m_{t,k}).
"""
from dataclasses import dataclass

import numpy as np

from ..exceptions import CompressorError


@dataclass(frozen=True)
class SparseMask:
    """
    Set of selected coordinates out of d.

    Attributes:
        selected: Strictly increasing int64 indices in [0, d)
        d: Problem dimension
    """
    selected: np.ndarray
    d: int

    def __post_init__(self):
        selected = np.asarray(self.selected, dtype=np.int64)
        if selected.ndim != 1:
            raise CompressorError("Mask indices must be 1-D")
        if self.d < 1:
            raise CompressorError(f"Mask dimension must be at least 1, got {self.d}")
        q = selected.shape[0]
        if q < 1 or q > self.d:
            raise CompressorError(f"Mask cardinality must be in [1, {self.d}], got {q}")
        if np.any(np.diff(selected) <= 0):
            raise CompressorError("Mask indices must be strictly increasing")
        if selected[0] < 0 or selected[-1] >= self.d:
            raise CompressorError(f"Mask indices must lie in [0, {self.d})")
        selected.setflags(write=False)
        object.__setattr__(self, "selected", selected)

    @classmethod
    def dense(cls, d: int) -> "SparseMask":
        """Mask selecting every coordinate."""
        return cls(np.arange(d, dtype=np.int64), d)

    @classmethod
    def from_indices(cls, indices, d: int) -> "SparseMask":
        """Build a mask from unsorted, possibly repeated indices."""
        return cls(np.unique(np.asarray(indices, dtype=np.int64)), d)

    @classmethod
    def from_bool(cls, flags: np.ndarray) -> "SparseMask":
        """Build a mask from a 0/1 vector."""
        flags = np.asarray(flags, dtype=bool)
        return cls(np.flatnonzero(flags).astype(np.int64), flags.shape[0])

    @property
    def cardinality(self) -> int:
        """q = ||m||_0."""
        return int(self.selected.shape[0])

    @property
    def is_dense(self) -> bool:
        return self.cardinality == self.d

    def as_bool(self) -> np.ndarray:
        """Return m as a boolean vector of length d."""
        flags = np.zeros(self.d, dtype=bool)
        flags[self.selected] = True
        return flags

    def complement_indices(self) -> np.ndarray:
        """Indices not selected, increasing."""
        return np.flatnonzero(~self.as_bool()).astype(np.int64)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseMask):
            return NotImplemented
        return self.d == other.d and np.array_equal(self.selected, other.selected)

    def __hash__(self) -> int:
        return hash((self.d, self.selected.tobytes()))
