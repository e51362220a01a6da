"""
Compressor configuration.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from ..exceptions import CompressorError


class CompressorKind(str, Enum):
    """Mask generation strategies"""
    DENSE = "dense"
    TOP_K = "top_k"
    RANDOM_K = "random_k"


@dataclass(frozen=True)
class CompressorSpec:
    """
    Which mask strategy to use and how many coordinates it keeps.

    Attributes:
        kind: Strategy
        q: Coordinates sent per worker per iteration (ignored for dense)
    """
    kind: CompressorKind = CompressorKind.DENSE
    q: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", CompressorKind(self.kind))
        if self.kind != CompressorKind.DENSE:
            if self.q is None or self.q < 1:
                raise CompressorError(f"{self.kind.value} needs q >= 1, got {self.q}")

    def validate_for(self, d: int) -> None:
        """Check 1 <= q <= d for the problem dimension."""
        if self.kind != CompressorKind.DENSE and not 1 <= self.q <= d:
            raise CompressorError(f"q must be in [1, {d}], got {self.q}")

    def effective_q(self, d: int) -> int:
        """Coordinates kept per send for dimension d."""
        return d if self.kind == CompressorKind.DENSE else int(self.q)

    @classmethod
    def dense(cls) -> "CompressorSpec":
        return cls(CompressorKind.DENSE)

    @classmethod
    def top_k(cls, q: int) -> "CompressorSpec":
        return cls(CompressorKind.TOP_K, q)

    @classmethod
    def random_k(cls, q: int) -> "CompressorSpec":
        return cls(CompressorKind.RANDOM_K, q)
