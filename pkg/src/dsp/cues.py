"""
Binaural cue extraction: GCC-PHAT delay, level difference, log-energy difference.

Sign convention: positive azimuth is the listener's right, and right-leading
or right-louder signals give positive itd_s, ild_db and led.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.core.config import settings
from src.models.audio import AudioClip, AudioLayout
from .stft import DspError, StftParams

PHAT_EPS = 1e-12


@dataclass(frozen=True)
class GccResult:
    """GCC-PHAT peak. Positive lag means the right channel lags the left."""

    lag: int
    curve: np.ndarray
    defined: bool = True


@dataclass(frozen=True)
class CueSequence:
    """Per-frame spatial cues on the STFT frame grid."""

    frame_times_s: np.ndarray
    itd_s: Optional[np.ndarray] = None
    ild_db: Optional[np.ndarray] = None
    led: Optional[np.ndarray] = None
    ix: Optional[np.ndarray] = None
    iy: Optional[np.ndarray] = None
    energy: Optional[np.ndarray] = None
    defined: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        n = self.frame_times_s.shape[0]
        for name in ("itd_s", "ild_db", "led", "ix", "iy", "energy", "defined"):
            values = getattr(self, name)
            if values is not None and values.shape[0] != n:
                raise DspError(f"cue '{name}' has {values.shape[0]} frames, expected {n}")

    @property
    def n_frames(self) -> int:
        return int(self.frame_times_s.shape[0])


def _gcc_curves(left: np.ndarray, right: np.ndarray, max_lag: int) -> np.ndarray:
    """PHAT-weighted cross-correlation over lags -max_lag..max_lag, along the last axis."""
    n = left.shape[-1]
    n_fft = 2 * n
    spec_l = np.fft.rfft(left, n=n_fft, axis=-1)
    spec_r = np.fft.rfft(right, n=n_fft, axis=-1)
    cross = spec_r * np.conj(spec_l)
    cross /= np.abs(cross) + PHAT_EPS
    cc = np.fft.irfft(cross, n=n_fft, axis=-1)
    return np.concatenate((cc[..., n_fft - max_lag :], cc[..., : max_lag + 1]), axis=-1)


def _check_frames(left: np.ndarray, right: np.ndarray) -> None:
    if left.shape != right.shape:
        raise DspError(f"frame shapes differ: {left.shape} vs {right.shape}")


def gcc_phat(left: np.ndarray, right: np.ndarray, max_lag: int | None = None) -> GccResult:
    """
    GCC-PHAT between two equal-length frames.

    Args:
        left: Left-channel frame
        right: Right-channel frame
        max_lag: Search range in samples, must be below the frame length

    Returns:
        GccResult with the argmax lag in [-max_lag, max_lag]; an all-zero
        channel gives lag 0 with defined=False
    """
    left = np.asarray(left, dtype=np.float64)
    right = np.asarray(right, dtype=np.float64)
    _check_frames(left, right)
    max_lag = settings.gcc_max_lag if max_lag is None else max_lag
    if left.ndim != 1:
        raise DspError("gcc_phat expects 1-D frames; use gcc_phat_frames for batches")
    if not 0 <= max_lag < left.size:
        raise DspError(f"max_lag={max_lag} must be below the frame length {left.size}")

    curve = _gcc_curves(left, right, max_lag)
    if not np.any(left) or not np.any(right):
        return GccResult(lag=0, curve=curve, defined=False)
    return GccResult(lag=int(np.argmax(curve)) - max_lag, curve=curve, defined=True)


def gcc_phat_frames(
    left: np.ndarray, right: np.ndarray, max_lag: int | None = None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised gcc_phat over [frames x n]; returns (lags, curves, defined)."""
    left = np.asarray(left, dtype=np.float64)
    right = np.asarray(right, dtype=np.float64)
    _check_frames(left, right)
    max_lag = settings.gcc_max_lag if max_lag is None else max_lag
    if not 0 <= max_lag < left.shape[-1]:
        raise DspError(f"max_lag={max_lag} must be below the frame length {left.shape[-1]}")

    curves = _gcc_curves(left, right, max_lag)
    defined = np.any(left != 0, axis=-1) & np.any(right != 0, axis=-1)
    lags = np.where(defined, np.argmax(curves, axis=-1) - max_lag, 0)
    return lags.astype(np.int64), curves, defined


def _energy(frame: np.ndarray) -> np.ndarray:
    return np.sum(np.asarray(frame, dtype=np.float64) ** 2, axis=-1)


def ild_db(left: np.ndarray, right: np.ndarray, eps: float | None = None) -> np.ndarray:
    """10*log10((E_r+eps)/(E_l+eps)), taken as a difference of logs so flips negate exactly."""
    eps = settings.energy_floor if eps is None else eps
    _check_frames(np.asarray(left), np.asarray(right))
    return 10.0 * (np.log10(_energy(right) + eps) - np.log10(_energy(left) + eps))


def led(left: np.ndarray, right: np.ndarray, eps: float | None = None) -> np.ndarray:
    """ln(E_r+eps) - ln(E_l+eps), in nats."""
    eps = settings.energy_floor if eps is None else eps
    _check_frames(np.asarray(left), np.asarray(right))
    return np.log(_energy(right) + eps) - np.log(_energy(left) + eps)


def stereo_cues(
    clip: AudioClip, params: StftParams | None = None, max_lag: int | None = None
) -> CueSequence:
    """Per-frame ITD, ILD and LED of a stereo clip."""
    if clip.layout is not AudioLayout.STEREO:
        raise DspError(f"stereo cues need a stereo clip, got {clip.layout.value}", code="layout")
    params = params or StftParams()
    frames_l = params.frame_signal(clip.samples[0])
    frames_r = params.frame_signal(clip.samples[1])
    lags, _, defined = gcc_phat_frames(frames_l, frames_r, max_lag)

    return CueSequence(
        frame_times_s=params.frame_centers_s(frames_l.shape[0], clip.sample_rate_hz),
        itd_s=-lags.astype(np.float64) / clip.sample_rate_hz,
        ild_db=ild_db(frames_l, frames_r),
        led=led(frames_l, frames_r),
        defined=defined,
    )


def gcc_summary(
    clip: AudioClip, params: StftParams | None = None, max_lag: int | None = None
) -> np.ndarray:
    """
    Per-frame GCC curve summary [frames x 3]: peak height, curve-weighted mean
    lead in ms (positive = right leads), and weighted lag spread in ms.
    """
    if clip.layout is not AudioLayout.STEREO:
        raise DspError(f"GCC summary needs a stereo clip, got {clip.layout.value}", code="layout")
    params = params or StftParams()
    max_lag = settings.gcc_max_lag if max_lag is None else max_lag
    frames_l = params.frame_signal(clip.samples[0])
    frames_r = params.frame_signal(clip.samples[1])
    _, curves, _ = gcc_phat_frames(frames_l, frames_r, max_lag)

    lags_ms = -np.arange(-max_lag, max_lag + 1) * 1000.0 / clip.sample_rate_hz
    weights = np.maximum(curves, 0.0)
    total = weights.sum(axis=1)
    safe = np.where(total > 0, total, 1.0)
    mean = (weights @ lags_ms) / safe
    spread = np.sqrt(np.maximum((weights @ lags_ms**2) / safe - mean**2, 0.0))
    peak = curves.max(axis=1)
    return np.stack([peak, mean, spread], axis=1)
