"""
Short-time Fourier analysis and weighted overlap-add resynthesis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import librosa
import numpy as np
from scipy import signal

from src.core.config import settings
from src.core.errors import SpatialLabError
from src.models.audio import AudioClip, AudioLayout


class DspError(SpatialLabError):
    """Invalid analysis parameters or input."""

    code = "dsp"


@dataclass(frozen=True)
class StftParams:
    """Hann analysis window and hop, in samples."""

    window_len: int = field(default_factory=lambda: settings.stft_window_len)
    hop: int = field(default_factory=lambda: settings.stft_hop)
    window: str = "hann"

    def __post_init__(self) -> None:
        if self.window_len <= 0 or self.window_len & (self.window_len - 1):
            raise DspError(f"window_len must be a power of two, got {self.window_len}")
        if not 0 < self.hop <= self.window_len:
            raise DspError(f"hop must be in (0, window_len], got {self.hop}")
        if not signal.check_NOLA(self.window_array(), self.window_len, self.window_len - self.hop):
            raise DspError(
                f"{self.window} window {self.window_len}/{self.hop} violates nonzero overlap-add"
            )

    @property
    def n_bins(self) -> int:
        return self.window_len // 2 + 1

    def window_array(self) -> np.ndarray:
        """Periodic analysis window."""
        return signal.get_window(self.window, self.window_len, fftbins=True)

    def n_frames(self, n_samples: int) -> int:
        if n_samples < self.window_len:
            return 0
        return 1 + (n_samples - self.window_len) // self.hop

    def frame_centers_s(self, n_frames: int, sample_rate_hz: int) -> np.ndarray:
        """Centre time of each analysis frame."""
        return (np.arange(n_frames) * self.hop + self.window_len / 2) / sample_rate_hz

    def frame_signal(self, x: np.ndarray) -> np.ndarray:
        """Unwindowed frames [frames x window_len] on the STFT grid."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] < self.window_len:
            raise DspError(
                f"input of {x.shape[-1]} samples is shorter than the "
                f"{self.window_len}-sample window",
                code="too_short",
            )
        frames = np.lib.stride_tricks.sliding_window_view(x, self.window_len, axis=-1)
        return frames[..., :: self.hop, :]


@dataclass(frozen=True)
class Spectrogram:
    """Complex STFT, bins shaped [frames x (window_len/2+1) x channels]."""

    bins: np.ndarray
    params: StftParams
    sample_rate_hz: int
    layout: AudioLayout = AudioLayout.MONO

    def __post_init__(self) -> None:
        if self.bins.ndim != 3 or self.bins.shape[1] != self.params.n_bins:
            raise DspError(
                f"spectrogram must be [frames x {self.params.n_bins} x channels], "
                f"got {self.bins.shape}"
            )
        if self.bins.shape[2] != self.layout.channels:
            raise DspError(
                f"{self.layout.value} spectrogram needs {self.layout.channels} channels, "
                f"got {self.bins.shape[2]}"
            )

    @property
    def n_frames(self) -> int:
        return int(self.bins.shape[0])

    @property
    def n_channels(self) -> int:
        return int(self.bins.shape[2])

    def channel(self, index: int) -> np.ndarray:
        return self.bins[:, :, index]

    def frame_times_s(self) -> np.ndarray:
        return self.params.frame_centers_s(self.n_frames, self.sample_rate_hz)

    def frequencies_hz(self) -> np.ndarray:
        return librosa.fft_frequencies(sr=self.sample_rate_hz, n_fft=self.params.window_len)

    def with_bins(self, bins: np.ndarray, layout: AudioLayout | None = None) -> "Spectrogram":
        return Spectrogram(bins, self.params, self.sample_rate_hz, layout or self.layout)


def stft(channel: np.ndarray, params: StftParams | None = None) -> np.ndarray:
    """
    Analyse one channel.

    Returns:
        Complex array [frames x bins], unnormalised rfft of Hann-windowed frames
    """
    params = params or StftParams()
    x = np.asarray(channel, dtype=np.float64)
    if x.ndim != 1:
        raise DspError(f"stft expects a single channel, got shape {x.shape}")
    if x.size < params.window_len:
        raise DspError(
            f"input of {x.size} samples is shorter than the {params.window_len}-sample window",
            code="too_short",
        )
    bins = librosa.stft(
        x,
        n_fft=params.window_len,
        hop_length=params.hop,
        window=params.window,
        center=False,
    )
    return bins.T


def istft(
    bins: np.ndarray, params: StftParams | None = None, length: int | None = None
) -> np.ndarray:
    """
    Weighted overlap-add resynthesis, normalised by the summed squared window.
    Samples past the last full frame are zero unless covered.
    """
    params = params or StftParams()
    bins = np.asarray(bins)
    if bins.ndim != 2 or bins.shape[1] != params.n_bins:
        raise DspError(f"istft expects [frames x {params.n_bins}], got shape {bins.shape}")
    n_frames = bins.shape[0]
    full_length = params.window_len + params.hop * (n_frames - 1) if n_frames else 0
    out = librosa.istft(
        bins.T,
        hop_length=params.hop,
        n_fft=params.window_len,
        window=params.window,
        center=False,
        length=full_length,
    )
    if length is None:
        return out
    if length <= out.size:
        return out[:length]
    return np.pad(out, (0, length - out.size))


def stft_clip(clip: AudioClip, params: StftParams | None = None) -> Spectrogram:
    """STFT of every channel of a clip."""
    params = params or StftParams()
    bins = np.stack([stft(ch, params) for ch in clip.samples], axis=-1)
    return Spectrogram(bins, params, clip.sample_rate_hz, clip.layout)


def istft_clip(spec: Spectrogram, length: int) -> AudioClip:
    """Resynthesise every channel of a spectrogram into a clip of the given length."""
    samples = np.stack(
        [istft(spec.channel(i), spec.params, length) for i in range(spec.n_channels)]
    )
    return AudioClip(samples, spec.sample_rate_hz, spec.layout)

