"""
Compressor strategies and their factory.
"""
from abc import ABC, abstractmethod
from typing import Callable, Dict, Optional

import numpy as np

from ..config.logging_config import logger
from ..core.masks import SparseMask
from ..core.vectors import ParamVector
from ..exceptions import CompressorError
from .masks import random_k_mask, top_k_mask
from .spec import CompressorKind, CompressorSpec


class Compressor(ABC):
    """
    Produces the per-worker mask m_{t,k} from the vector about to be sent.
    """

    def __init__(self, d: int):
        self.d = d

    @property
    @abstractmethod
    def q(self) -> int:
        """Coordinates kept per send."""
        pass

    @property
    def uses_stream(self) -> bool:
        """True when mask() draws from the worker stream."""
        return False

    @property
    def needs_vector(self) -> bool:
        """True when mask() looks at the candidate vector."""
        return False

    @abstractmethod
    def mask(self, v: ParamVector, stream: Optional[np.random.Generator]) -> SparseMask:
        """
        Build the mask for ``v``.

        Args:
            v: Candidate vector g + u
            stream: The worker's stream for this iteration (random-K only)
        """
        pass


class DenseCompressor(Compressor):
    """Sends every coordinate."""

    def __init__(self, d: int):
        super().__init__(d)
        self._mask = SparseMask.dense(d)

    @property
    def q(self) -> int:
        return self.d

    def mask(self, v, stream=None) -> SparseMask:
        return self._mask


class TopKCompressor(Compressor):
    """Largest-magnitude q coordinates of the worker's own g + u."""

    def __init__(self, d: int, q: int):
        super().__init__(d)
        self._q = q

    @property
    def q(self) -> int:
        return self._q

    @property
    def needs_vector(self) -> bool:
        return True

    def mask(self, v, stream=None) -> SparseMask:
        return top_k_mask(v, self._q)


class RandomKCompressor(Compressor):
    """Uniform q-subset per worker per iteration."""

    def __init__(self, d: int, q: int):
        super().__init__(d)
        self._q = q
        self._dense = SparseMask.dense(d) if q == d else None

    @property
    def q(self) -> int:
        return self._q

    @property
    def uses_stream(self) -> bool:
        return self._dense is None

    def mask(self, v, stream=None) -> SparseMask:
        if self._dense is not None:
            return self._dense
        if stream is None:
            raise CompressorError("random_k needs a random stream")
        return random_k_mask(stream, self.d, self._q)


_BUILDERS: Dict[CompressorKind, Callable[[CompressorSpec, int], Compressor]] = {
    CompressorKind.DENSE: lambda spec, d: DenseCompressor(d),
    CompressorKind.TOP_K: lambda spec, d: TopKCompressor(d, spec.q),
    CompressorKind.RANDOM_K: lambda spec, d: RandomKCompressor(d, spec.q),
}


def make_compressor(spec: CompressorSpec, d: int) -> Compressor:
    """
    Build the compressor described by ``spec`` for dimension d.

    Raises:
        CompressorError: If q is not in [1, d]
    """
    spec.validate_for(d)
    compressor = _BUILDERS[spec.kind](spec, d)
    logger.debug(f"Created compressor {spec.kind.value} (q={compressor.q}, d={d})")
    return compressor
