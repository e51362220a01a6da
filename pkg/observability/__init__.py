"""
Observability: run metrics (latency, errors, communication counts).
"""

from .metrics import MetricsCollector, InMemoryMetricsCollector

__all__ = [
    "MetricsCollector",
    "InMemoryMetricsCollector",
]
