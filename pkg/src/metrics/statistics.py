"""
Correlation, circular-error and spectrogram L1 metrics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import stats

from src.core.errors import SpatialLabError
from src.dsp.stft import Spectrogram


class MetricError(SpatialLabError):
    code = "metric"


@dataclass(frozen=True)
class PairedSeries:
    """Two equal-length finite series of at least three points."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=np.float64).ravel()
        y = np.asarray(self.y, dtype=np.float64).ravel()
        if x.size != y.size:
            raise MetricError(f"series lengths differ: {x.size} vs {y.size}")
        if x.size < 3:
            raise MetricError(f"need at least 3 paired values, got {x.size}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise MetricError("series contain non-finite values")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)


@dataclass(frozen=True)
class Correlation:
    """Correlation coefficient; value is None when a series has zero variance."""

    value: float | None
    defined: bool = True


def _as_series(series: PairedSeries | tuple) -> PairedSeries:
    return series if isinstance(series, PairedSeries) else PairedSeries(*series)


def pearson(series: PairedSeries | tuple) -> Correlation:
    """Product-moment correlation."""
    series = _as_series(series)
    if np.ptp(series.x) == 0 or np.ptp(series.y) == 0:
        return Correlation(None, defined=False)
    r = float(stats.pearsonr(series.x, series.y)[0])
    return Correlation(float(np.clip(r, -1.0, 1.0)))


def spearman(series: PairedSeries | tuple) -> Correlation:
    """Rank correlation with average ranks for ties."""
    series = _as_series(series)
    if np.ptp(stats.rankdata(series.x)) == 0 or np.ptp(stats.rankdata(series.y)) == 0:
        return Correlation(None, defined=False)
    rho = float(stats.spearmanr(series.x, series.y)[0])
    return Correlation(float(np.clip(rho, -1.0, 1.0)))


def circular_error_deg(a: np.ndarray | float, b: np.ndarray | float) -> np.ndarray | float:
    """Angular distance in degrees, in [0, 180]."""
    diff = np.mod(np.abs(np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)), 360.0)
    error = np.minimum(diff, 360.0 - diff)
    return float(error) if error.ndim == 0 else error


def l1_spec(
    pred: Spectrogram | np.ndarray,
    target: Spectrogram | np.ndarray,
    mode: Literal["complex", "magnitude"] = "complex",
) -> float:
    """
    Mean L1 over all time-frequency bins and channels.

    complex: mean of |Re d| + |Im d|; magnitude: mean of |d| on real magnitudes.
    """
    pred_bins = pred.bins if isinstance(pred, Spectrogram) else np.asarray(pred)
    target_bins = target.bins if isinstance(target, Spectrogram) else np.asarray(target)
    if pred_bins.shape != target_bins.shape:
        raise MetricError(f"shape mismatch: {pred_bins.shape} vs {target_bins.shape}")
    if pred_bins.size == 0:
        raise MetricError("cannot score empty spectrograms")

    diff = pred_bins - target_bins
    if mode == "complex":
        return float(np.mean(np.abs(diff.real) + np.abs(diff.imag)))
    if mode == "magnitude":
        if np.iscomplexobj(diff):
            raise MetricError("magnitude mode expects real magnitudes")
        return float(np.mean(np.abs(diff)))
    raise MetricError(f"unknown L1 mode: {mode}")
