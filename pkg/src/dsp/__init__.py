"""Time-frequency analysis and spatial-cue kernels."""

from .cues import (
    CueSequence,
    GccResult,
    gcc_phat,
    gcc_phat_frames,
    gcc_summary,
    ild_db,
    led,
    stereo_cues,
)
from .foa import foa_cross_features, intensity_azimuth, intensity_vector
from .mel import MelParams, MelSpectrogram, hz_to_mel, log_mel, mel_filterbank
from .stft import (
    DspError,
    Spectrogram,
    StftParams,
    istft,
    istft_clip,
    stft,
    stft_clip,
)

__all__ = [
    "CueSequence",
    "DspError",
    "GccResult",
    "MelParams",
    "MelSpectrogram",
    "Spectrogram",
    "StftParams",
    "foa_cross_features",
    "gcc_phat",
    "gcc_phat_frames",
    "gcc_summary",
    "hz_to_mel",
    "ild_db",
    "intensity_azimuth",
    "intensity_vector",
    "istft",
    "istft_clip",
    "led",
    "log_mel",
    "mel_filterbank",
    "stereo_cues",
    "stft",
    "stft_clip",
]
