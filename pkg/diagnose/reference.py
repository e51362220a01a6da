"""
Uncompressed reference trajectories.
"""
from typing import List, Optional, Sequence

from ..config.logging_config import logger
from ..config.run_config import RunConfig, Variant
from ..core.state import CSV_COLUMNS, MetricsRow
from ..problems.oracle import ProblemOracle


def reference_run(config: RunConfig, oracle: Optional[ProblemOracle] = None):
    """
    Run the dense baseline under the same seeds and schedule as ``config``.

    Args:
        config: Any run configuration; its variant is replaced by dense_dsgd
        oracle: Problem to reuse (built from the config when None)

    Returns:
        RunResult of the dense run
    """
    # Imported here: the engine itself depends on this package
    from ..engine.engine import run

    reference = config.with_overrides(variant=Variant.DENSE_DSGD)
    logger.info(f"Reference run for {config.variant.value} on {config.problem.name}")
    return run(reference, oracle=oracle)


# Columns that describe the trajectory (sent_nnz differs by construction)
TRAJECTORY_COLUMNS: List[str] = [c for c in CSV_COLUMNS if c != "sent_nnz"]


def trajectories_identical(
    first: Sequence[MetricsRow],
    second: Sequence[MetricsRow],
    columns: Sequence[str] = tuple(TRAJECTORY_COLUMNS),
) -> bool:
    """True when both row sequences agree bit-for-bit on ``columns``."""
    if len(first) != len(second):
        return False
    for a, b in zip(first, second):
        for column in columns:
            if getattr(a, column) != getattr(b, column):
                return False
    return True
