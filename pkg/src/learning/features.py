"""
Frame-level feature assembly for the alignment model.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Sequence

import numpy as np

from src.core.config import settings
from src.core.errors import SpatialLabError
from src.dsp.stft import StftParams
from src.models.audio import AudioClip, AudioLayout, SourceTrajectory
from src.models.schemas import FeatureMode, NormStatsRecord

STD_FLOOR = 1e-12


class FeatureError(SpatialLabError):
    """Features cannot be assembled for the given clip and trajectory."""

    code = "features"


@dataclass(frozen=True)
class AudioFeatures:
    """Extractor output: per-frame values and the frame energy used for activity."""

    frame_times_s: np.ndarray
    values: np.ndarray
    energy: np.ndarray


@dataclass(frozen=True)
class FeatureSequence:
    """Audio and trajectory features on a shared frame grid (unnormalized)."""

    audio: np.ndarray
    traj: np.ndarray
    frame_times_s: np.ndarray
    azimuth_rad: np.ndarray
    active: np.ndarray

    @property
    def n_frames(self) -> int:
        return int(self.audio.shape[0])


def ablate_channels(clip: AudioClip, channels: Iterable[str]) -> AudioClip:
    """Zero the named channels (layout names, e.g. 'y', 'z', 'x' or 'left')."""
    names = list(channels)
    if not names:
        return clip
    samples = np.array(clip.samples)
    for name in names:
        if name not in clip.layout.channel_names:
            raise FeatureError(
                f"{clip.layout.value} layout has no channel '{name}'", code="ablation"
            )
        samples[clip.layout.channel_names.index(name)] = 0.0
    return clip.with_samples(samples)


def trajectory_features(
    trajectory: SourceTrajectory, frame_times_s: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """(sin phi, cos phi) at frame centres, plus the interpolated azimuth."""
    if frame_times_s.size and not trajectory.covers(frame_times_s[0], frame_times_s[-1]):
        raise FeatureError(
            f"trajectory [{trajectory.times_s[0]:.3f}, {trajectory.duration_s:.3f}] s does not "
            f"cover frames [{frame_times_s[0]:.3f}, {frame_times_s[-1]:.3f}] s",
            code="coverage",
        )
    azimuth = trajectory.azimuth_at(frame_times_s)
    return np.stack([np.sin(azimuth), np.cos(azimuth)], axis=1), azimuth


def active_frames(energy: np.ndarray, ratio: float | None = None) -> np.ndarray:
    """Frames at or above ratio x the clip's loudest frame."""
    ratio = settings.active_frame_ratio if ratio is None else ratio
    peak = float(np.max(energy)) if energy.size else 0.0
    if peak <= 0:
        return np.zeros(energy.shape, dtype=bool)
    return energy >= ratio * peak


def assemble_features(
    trajectory: SourceTrajectory,
    audio: AudioClip,
    mode: FeatureMode = FeatureMode.CUES,
    ablate: Sequence[str] = (),
    params: StftParams | None = None,
) -> FeatureSequence:
    """
    Compute audio features per STFT frame and align the trajectory to them.

    Raises:
        FeatureError: trajectory does not cover the clip, or mode/layout mismatch
    """
    from .registry import FeatureRegistry

    params = params or StftParams()
    if audio.n_samples < params.window_len:
        raise FeatureError(f"clip of {audio.n_samples} samples is shorter than one frame")
    if not trajectory.covers(0.0, (audio.n_samples - 1) / audio.sample_rate_hz):
        raise FeatureError(
            f"trajectory ends at {trajectory.duration_s:.3f} s but the clip lasts "
            f"{audio.duration_s:.3f} s",
            code="coverage",
        )

    extractor = FeatureRegistry.get(mode)
    extracted = extractor.extract(ablate_channels(audio, ablate), params)
    traj_feats, azimuth = trajectory_features(trajectory, extracted.frame_times_s)
    return FeatureSequence(
        audio=extracted.values,
        traj=traj_feats,
        frame_times_s=extracted.frame_times_s,
        azimuth_rad=azimuth,
        active=active_frames(extracted.energy),
    )


@dataclass(frozen=True)
class NormStats:
    """Per-feature z-score statistics fitted on the training split."""

    audio_mean: np.ndarray
    audio_std: np.ndarray
    traj_mean: np.ndarray
    traj_std: np.ndarray

    @classmethod
    def fit(
        cls, audio: np.ndarray, traj: np.ndarray, mask: np.ndarray | None = None
    ) -> "NormStats":
        """Fit on [N x T x d] arrays; masked-out (padding) frames are ignored."""
        if mask is None:
            mask = np.ones(audio.shape[:2], dtype=bool)
        audio_frames = audio[mask]
        traj_frames = traj[mask]
        if audio_frames.shape[0] == 0:
            raise FeatureError("cannot fit normalization on zero frames")

        def floor(std: np.ndarray) -> np.ndarray:
            return np.where(std < STD_FLOOR, 1.0, std)

        return cls(
            audio_mean=audio_frames.mean(axis=0),
            audio_std=floor(audio_frames.std(axis=0)),
            traj_mean=traj_frames.mean(axis=0),
            traj_std=floor(traj_frames.std(axis=0)),
        )

    @classmethod
    def identity(cls, audio_dim: int, traj_dim: int) -> "NormStats":
        return cls(np.zeros(audio_dim), np.ones(audio_dim), np.zeros(traj_dim), np.ones(traj_dim))

    def apply_audio(self, values: np.ndarray) -> np.ndarray:
        return (values - self.audio_mean) / self.audio_std

    def apply_traj(self, values: np.ndarray) -> np.ndarray:
        return (values - self.traj_mean) / self.traj_std

    def to_record(self) -> NormStatsRecord:
        return NormStatsRecord(
            audio_mean=self.audio_mean.tolist(),
            audio_std=self.audio_std.tolist(),
            traj_mean=self.traj_mean.tolist(),
            traj_std=self.traj_std.tolist(),
        )

    @classmethod
    def from_record(cls, record: NormStatsRecord) -> "NormStats":
        return cls(
            np.asarray(record.audio_mean, dtype=np.float64),
            np.asarray(record.audio_std, dtype=np.float64),
            np.asarray(record.traj_mean, dtype=np.float64),
            np.asarray(record.traj_std, dtype=np.float64),
        )


@dataclass(frozen=True)
class FeatureDataset:
    """Padded batch of feature sequences with labels, shaped [N x T x d]."""

    audio: np.ndarray
    traj: np.ndarray
    mask: np.ndarray
    y: np.ndarray
    ids: List[str]
    layout: AudioLayout
    azimuth_rad: np.ndarray
    active: np.ndarray

    @property
    def n(self) -> int:
        return int(self.y.shape[0])

    @property
    def audio_dim(self) -> int:
        return int(self.audio.shape[2])

    @property
    def traj_dim(self) -> int:
        return int(self.traj.shape[2])

    @classmethod
    def from_sequences(
        cls,
        sequences: Sequence[FeatureSequence],
        labels: Sequence[int],
        ids: Sequence[str],
        layout: AudioLayout,
        audio_dim: int,
    ) -> "FeatureDataset":
        n = len(sequences)
        frames = max((s.n_frames for s in sequences), default=0)
        audio = np.zeros((n, frames, audio_dim))
        traj = np.zeros((n, frames, 2))
        mask = np.zeros((n, frames), dtype=bool)
        azimuth = np.zeros((n, frames))
        active = np.zeros((n, frames), dtype=bool)
        for i, seq in enumerate(sequences):
            t = seq.n_frames
            audio[i, :t] = seq.audio
            traj[i, :t] = seq.traj
            mask[i, :t] = True
            azimuth[i, :t] = seq.azimuth_rad
            active[i, :t] = seq.active
        return cls(
            audio=audio,
            traj=traj,
            mask=mask,
            y=np.asarray(labels, dtype=np.float64),
            ids=list(ids),
            layout=layout,
            azimuth_rad=azimuth,
            active=active,
        )

    def with_labels(self, y: np.ndarray) -> "FeatureDataset":
        return FeatureDataset(
            audio=self.audio,
            traj=self.traj,
            mask=self.mask,
            y=np.asarray(y, dtype=np.float64),
            ids=self.ids,
            layout=self.layout,
            azimuth_rad=self.azimuth_rad,
            active=self.active,
        )
