"""
Per-worker state and per-iteration metric records.
"""
from dataclasses import dataclass, fields
from typing import List, Sequence

import numpy as np

from .vectors import ParamVector, zeros


@dataclass
class WorkerState:
    """
    State owned by one simulated worker between synchronization points.

    Attributes:
        momentum: Momentum buffer g_{t,k}
        memory: Memory gradient u_{t,k} (unsent residual)
        worker_id: Worker index in [0, p)
    """
    momentum: ParamVector
    memory: ParamVector
    worker_id: int

    @classmethod
    def zeros(cls, d: int, worker_id: int) -> "WorkerState":
        """Fresh worker state: g_{-1,k} = u_{0,k} = 0."""
        return cls(momentum=zeros(d), memory=zeros(d), worker_id=worker_id)

    def copy(self) -> "WorkerState":
        return WorkerState(self.momentum.copy(), self.memory.copy(), self.worker_id)


# Column order of metrics.csv
CSV_COLUMNS: List[str] = [
    "t",
    "F",
    "grad_norm",
    "mem_norm",
    "zw_dist",
    "transform_residual",
    "eta",
    "rho",
    "gamma",
    "sent_nnz",
]

_INT_COLUMNS = {"t", "sent_nnz"}


@dataclass(frozen=True)
class MetricsRow:
    """
    One diagnostics row.

    ``transform_residual`` is the largest raw infinity-norm residual of the
    transformation equation over the steps since the previous row.
    ``sent_nnz`` counts coordinates sent by all workers over the same steps.
    """
    t: int
    F: float
    grad_norm: float
    mem_norm: float
    zw_dist: float
    transform_residual: float
    eta: float
    rho: float
    gamma: float
    sent_nnz: int

    def __post_init__(self):
        if self.transform_residual < 0:
            raise ValueError("transform_residual must be non-negative")
        for f in fields(self):
            value = getattr(self, f.name)
            if not np.isfinite(value):
                raise ValueError(f"MetricsRow.{f.name} is not finite: {value}")

    def to_csv_fields(self) -> List[str]:
        """Serialize with 17 significant digits so floats round-trip exactly."""
        out = []
        for name in CSV_COLUMNS:
            value = getattr(self, name)
            out.append(str(int(value)) if name in _INT_COLUMNS else format(float(value), ".17g"))
        return out

    @classmethod
    def from_csv_fields(cls, values: Sequence[str]) -> "MetricsRow":
        if len(values) != len(CSV_COLUMNS):
            raise ValueError(f"Expected {len(CSV_COLUMNS)} fields, got {len(values)}")
        kwargs = {
            name: int(raw) if name in _INT_COLUMNS else float(raw)
            for name, raw in zip(CSV_COLUMNS, values)
        }
        return cls(**kwargs)
