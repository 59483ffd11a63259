"""
Built-in audio front ends: spatial cues, cues plus GCC summary, log-mel.
"""

import numpy as np

from src.core.config import settings
from src.dsp.cues import gcc_summary, stereo_cues
from src.dsp.foa import intensity_vector
from src.dsp.mel import log_mel
from src.dsp.stft import StftParams, stft_clip
from src.models.audio import AudioClip, AudioLayout
from src.models.schemas import FeatureMode
from .features import AudioFeatures, FeatureError
from .registry import ExtractorMetadata


def _time_energy(clip: AudioClip, params: StftParams) -> np.ndarray:
    """Per-frame energy summed over channels."""
    frames = params.frame_signal(clip.samples)
    return np.sum(frames**2, axis=(0, 2))


class CueExtractor:
    """Stereo: [itd_ms, ild_db, led]. FOA: [i_x/e, i_y/e, log e]."""

    def extract(self, clip: AudioClip, params: StftParams) -> AudioFeatures:
        if clip.layout is AudioLayout.STEREO:
            cues = stereo_cues(clip, params)
            values = np.stack([cues.itd_s * 1000.0, cues.ild_db, cues.led], axis=1)
            return AudioFeatures(cues.frame_times_s, values, _time_energy(clip, params))

        if clip.layout is AudioLayout.FOA:
            cues = intensity_vector(stft_clip(clip, params))
            eps = settings.energy_floor
            energy = cues.energy + eps
            values = np.stack([cues.ix / energy, cues.iy / energy, np.log(energy)], axis=1)
            return AudioFeatures(cues.frame_times_s, values, cues.energy)

        raise FeatureError(f"cue features need a stereo or FOA clip, got {clip.layout.value}")

    def dim(self, layout: AudioLayout) -> int:
        return 3

    def get_metadata(self) -> ExtractorMetadata:
        return ExtractorMetadata(
            name="Spatial cues",
            mode=FeatureMode.CUES,
            description="Interaural delay, level and log-energy difference, or FOA intensity",
            layouts=[AudioLayout.STEREO, AudioLayout.FOA],
        )


class CueGccExtractor:
    """Stereo cues plus GCC-PHAT peak, weighted mean lead and spread."""

    def __init__(self) -> None:
        self._cues = CueExtractor()

    def extract(self, clip: AudioClip, params: StftParams) -> AudioFeatures:
        if clip.layout is not AudioLayout.STEREO:
            raise FeatureError(f"cues_gcc needs a stereo clip, got {clip.layout.value}")
        base = self._cues.extract(clip, params)
        values = np.concatenate([base.values, gcc_summary(clip, params)], axis=1)
        return AudioFeatures(base.frame_times_s, values, base.energy)

    def dim(self, layout: AudioLayout) -> int:
        if layout is not AudioLayout.STEREO:
            raise FeatureError(f"cues_gcc needs a stereo layout, got {layout.value}")
        return 6

    def get_metadata(self) -> ExtractorMetadata:
        return ExtractorMetadata(
            name="Spatial cues + GCC-PHAT",
            mode=FeatureMode.CUES_GCC,
            description="Stereo cues with a three-value GCC-PHAT curve summary",
            layouts=[AudioLayout.STEREO],
        )


class MelExtractor:
    """Per-channel log-mel frames, flattened to [frames x n_mels*channels]."""

    def extract(self, clip: AudioClip, params: StftParams) -> AudioFeatures:
        spec = stft_clip(clip, params)
        mel = log_mel(spec)
        values = mel.values.reshape(mel.n_frames, -1)
        energy = np.sum(np.abs(spec.bins) ** 2, axis=(1, 2))
        return AudioFeatures(spec.frame_times_s(), values, energy)

    def dim(self, layout: AudioLayout) -> int:
        return settings.n_mels * layout.channels

    def get_metadata(self) -> ExtractorMetadata:
        return ExtractorMetadata(
            name="Log-mel",
            mode=FeatureMode.MEL,
            description="Stacked per-channel log-mel spectrogram frames",
            layouts=[AudioLayout.STEREO, AudioLayout.FOA],
        )
