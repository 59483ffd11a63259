"""Statistical metrics shared by analysis and evaluation."""

from .statistics import (
    Correlation,
    MetricError,
    PairedSeries,
    circular_error_deg,
    l1_spec,
    pearson,
    spearman,
)

__all__ = [
    "Correlation",
    "MetricError",
    "PairedSeries",
    "circular_error_deg",
    "l1_spec",
    "pearson",
    "spearman",
]
