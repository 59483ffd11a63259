"""
Log-mel spectrogram on the HTK mel scale.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import librosa
import numpy as np

from src.core.config import settings
from .stft import DspError, Spectrogram


@dataclass(frozen=True)
class MelParams:
    n_mels: int = field(default_factory=lambda: settings.n_mels)
    f_min_hz: float = field(default_factory=lambda: settings.mel_f_min_hz)
    f_max_hz: float = field(default_factory=lambda: settings.mel_f_max_hz)
    floor: float = field(default_factory=lambda: settings.energy_floor)


@dataclass(frozen=True)
class MelSpectrogram:
    """Natural-log mel power, values shaped [frames x n_mels x channels]."""

    values: np.ndarray
    params: MelParams

    @property
    def n_frames(self) -> int:
        return int(self.values.shape[0])


def hz_to_mel(freq_hz: float | np.ndarray) -> float | np.ndarray:
    """HTK mel scale: 2595 * log10(1 + f / 700)."""
    return librosa.hz_to_mel(freq_hz, htk=True)


@lru_cache(maxsize=8)
def _filterbank(sr: int, n_fft: int, n_mels: int, f_min: float, f_max: float) -> np.ndarray:
    fb = librosa.filters.mel(
        sr=sr, n_fft=n_fft, n_mels=n_mels, fmin=f_min, fmax=f_max, htk=True, norm=None
    )
    peaks = fb.max(axis=1, keepdims=True)
    if np.any(peaks <= 0):
        raise DspError(f"{n_mels} mel bands leave empty filters for a {n_fft}-point FFT")
    fb = fb / peaks
    fb.setflags(write=False)
    return fb


def mel_filterbank(
    sample_rate_hz: int, window_len: int, params: MelParams | None = None
) -> np.ndarray:
    """
    Triangular filterbank [n_mels x bins], each row scaled to unit peak.

    Raises:
        DspError: more mel bands than FFT bins, or a band containing no bin
    """
    params = params or MelParams()
    n_bins = window_len // 2 + 1
    if params.n_mels > n_bins:
        raise DspError(f"n_mels={params.n_mels} exceeds the {n_bins} available FFT bins")
    if not 0 <= params.f_min_hz < params.f_max_hz <= sample_rate_hz / 2:
        raise DspError(
            f"mel range [{params.f_min_hz}, {params.f_max_hz}] Hz invalid at {sample_rate_hz} Hz"
        )
    return _filterbank(
        sample_rate_hz, window_len, params.n_mels, float(params.f_min_hz), float(params.f_max_hz)
    )


def log_mel(spec: Spectrogram, params: MelParams | None = None) -> MelSpectrogram:
    """Mel-weighted power per channel, natural log with a floor."""
    params = params or MelParams()
    if spec.sample_rate_hz != settings.sample_rate_hz:
        raise DspError(
            f"log_mel expects {settings.sample_rate_hz} Hz input, got {spec.sample_rate_hz} Hz"
        )
    fb = mel_filterbank(spec.sample_rate_hz, spec.params.window_len, params)
    power = np.abs(spec.bins) ** 2
    mel_power = np.einsum("mk,fkc->fmc", fb, power)
    return MelSpectrogram(np.log(np.maximum(mel_power, params.floor)), params)
