"""
Deterministic per-worker random streams.

Streams are counter-based (Philox) and keyed on (run_seed, worker_id, t), so the
batch a worker draws at iteration t does not depend on which thread computes it
or in what order workers run. The Philox key comes from (run_seed, worker_id)
and t sits in the top counter word, which keeps the per-iteration streams of a
worker disjoint.
"""
from functools import lru_cache
from typing import Tuple

import numpy as np

from ..exceptions import ValidationError

# Domain-separation tag keeps worker streams disjoint from other seeded uses
# of the same run seed (stage seeds, data generation).
_WORKER_STREAM_TAG = 0x6D656D73


@lru_cache(maxsize=4096)
def _worker_key(run_seed: int, worker_id: int) -> Tuple[int, int]:
    words = np.random.SeedSequence([_WORKER_STREAM_TAG, run_seed, worker_id]).generate_state(2, dtype=np.uint64)
    return int(words[0]), int(words[1])


def worker_rng_stream(run_seed: int, worker_id: int, t: int) -> np.random.Generator:
    """
    Create the random stream for one worker at one iteration.

    Args:
        run_seed: Run-level seed
        worker_id: Worker index, >= 0
        t: Iteration index, >= 0

    Returns:
        A fresh ``numpy.random.Generator`` backed by Philox

    Raises:
        ValidationError: If any key component is negative
    """
    if run_seed < 0 or worker_id < 0 or t < 0:
        raise ValidationError(
            f"Stream keys must be non-negative, got seed={run_seed}, worker={worker_id}, t={t}"
        )
    key = np.array(_worker_key(run_seed, worker_id), dtype=np.uint64)
    counter = np.array([0, 0, 0, t], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(counter=counter, key=key))


def data_rng(data_seed: int) -> np.random.Generator:
    """Random stream used to generate synthetic problem data."""
    if data_seed < 0:
        raise ValidationError(f"Data seed must be non-negative, got {data_seed}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([data_seed])))


def derive_seed(run_seed: int, *keys: int) -> int:
    """Derive a child seed from ``run_seed`` and integer ``keys``."""
    seq = np.random.SeedSequence([run_seed, *keys])
    return int(seq.generate_state(1, dtype=np.uint32)[0])
