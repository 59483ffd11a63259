"""
Label-generating transforms (channel flip, z-axis rotation) and the
label-preserving joint augmentations.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from src.core.errors import SpatialLabError
from src.models.audio import AudioClip, AudioLayout, SourceTrajectory, wrap_angle
from src.models.schemas import AlignmentLabel, TaskMode

logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi


class LayoutError(SpatialLabError):
    """Operation applied to a clip of the wrong channel layout or shape."""

    code = "layout"


@dataclass(frozen=True)
class RotationAngle:
    """Rotation about the z-axis, normalized to [0, 2*pi)."""

    theta_rad: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta_rad", float(self.theta_rad) % TWO_PI)

    @property
    def degrees(self) -> float:
        return math.degrees(self.theta_rad)


def _require(clip: AudioClip, layout: AudioLayout, operation: str) -> None:
    if clip.layout is not layout:
        raise LayoutError(f"{operation} needs a {layout.value} clip, got {clip.layout.value}")


def flip_stereo(clip: AudioClip) -> AudioClip:
    """Swap left and right channels."""
    _require(clip, AudioLayout.STEREO, "flip_stereo")
    return clip.with_samples(clip.samples[::-1])


def rotate_foa(clip: AudioClip, theta: float | RotationAngle) -> AudioClip:
    """
    Rotate an FOA clip about the z-axis:
    (w, y, z, x) -> (w, x sin t + y cos t, z, x cos t - y sin t).
    A source encoded at azimuth p ends up at p + t.
    """
    _require(clip, AudioLayout.FOA, "rotate_foa")
    angle = theta if isinstance(theta, RotationAngle) else RotationAngle(theta)
    sin_t, cos_t = math.sin(angle.theta_rad), math.cos(angle.theta_rad)
    w, y, z, x = clip.samples
    rotated = np.stack([w, x * sin_t + y * cos_t, z, x * cos_t - y * sin_t])
    return clip.with_samples(rotated)


def downmix_to_mono(clip: AudioClip) -> AudioClip:
    _require(clip, AudioLayout.STEREO, "downmix_to_mono")
    mono = (clip.samples[0] + clip.samples[1]) / 2.0
    return clip.with_samples(mono[np.newaxis, :], AudioLayout.MONO)


def mix_clips(a: AudioClip, b: AudioClip) -> AudioClip:
    """Sample-wise sum without renormalization; peaks above 1 are reported."""
    if a.layout is not b.layout or a.sample_rate_hz != b.sample_rate_hz:
        raise LayoutError(
            f"cannot mix {a.layout.value}@{a.sample_rate_hz} with "
            f"{b.layout.value}@{b.sample_rate_hz}"
        )
    if a.samples.shape != b.samples.shape:
        raise LayoutError(f"cannot mix shapes {a.samples.shape} and {b.samples.shape}")
    mixed = a.with_samples(a.samples + b.samples)
    if mixed.peak > 1.0:
        logger.warning(f"⚠️  Mixture peak {mixed.peak:.3f} exceeds full scale")
    return mixed


def mirror_trajectory(trajectory: SourceTrajectory) -> SourceTrajectory:
    """Reflect left-right: azimuth -> -azimuth."""
    return trajectory.with_azimuth(-trajectory.azimuth_rad)


def rotate_trajectory(
    trajectory: SourceTrajectory, theta: float | RotationAngle
) -> SourceTrajectory:
    """Shift azimuth by theta, wrapped to [-pi, pi)."""
    angle = theta if isinstance(theta, RotationAngle) else RotationAngle(theta)
    return trajectory.with_azimuth(wrap_angle(trajectory.azimuth_rad + angle.theta_rad))


@dataclass(frozen=True)
class TrainingExample:
    trajectory: SourceTrajectory
    audio: AudioClip
    label: AlignmentLabel
    augmented: bool = False

    def flipped(self) -> "TrainingExample":
        """Flip the audio once more; each flip toggles alignment."""
        if self.label.kind == "rotation":
            raise LayoutError("cannot flip a rotation-labelled example")
        label = AlignmentLabel.flipped() if self.label.aligned else AlignmentLabel.aligned_pair()
        return TrainingExample(self.trajectory, flip_stereo(self.audio), label, self.augmented)


def joint_mirror(
    trajectory: SourceTrajectory, audio: AudioClip, rng: np.random.Generator | None = None
) -> tuple[SourceTrajectory, AudioClip]:
    """
    Label-preserving augmentation applied to both streams.
    Stereo: mirror the trajectory and flip the audio. FOA: rotate both by one
    uniform angle drawn from rng.
    """
    if audio.layout is AudioLayout.STEREO:
        return mirror_trajectory(trajectory), flip_stereo(audio)
    if audio.layout is AudioLayout.FOA:
        if rng is None:
            raise LayoutError("FOA joint augmentation needs an rng for the shared rotation")
        psi = rng.uniform(0.0, TWO_PI)
        return rotate_trajectory(trajectory, psi), rotate_foa(audio, psi)
    raise LayoutError(f"joint augmentation undefined for {audio.layout.value} clips")


def make_training_example(
    trajectory: SourceTrajectory,
    audio: AudioClip,
    mode: TaskMode,
    rng: np.random.Generator,
    theta_range_rad: tuple[float, float] = (0.95 * math.pi, 1.05 * math.pi),
    negative_prob: float = 0.5,
    augment_prob: float = 0.5,
) -> TrainingExample:
    """
    Draw a pretext example from an aligned scene.

    With probability negative_prob the audio is flipped (flip mode) or rotated
    by theta ~ U(theta_range) (rotation mode) and labelled misaligned. With an
    independent probability augment_prob the joint mirror is applied first.

    Raises:
        LayoutError: mode and clip layout disagree
    """
    if audio.layout is not mode.layout:
        raise LayoutError(
            f"{mode.value} mode needs a {mode.layout.value} clip, got {audio.layout.value}"
        )

    negative = bool(rng.random() < negative_prob)
    theta = float(rng.uniform(*theta_range_rad)) if negative and mode is TaskMode.ROTATION else 0.0
    augment = bool(rng.random() < augment_prob)

    if augment:
        trajectory, audio = joint_mirror(trajectory, audio, rng)

    if not negative:
        return TrainingExample(trajectory, audio, AlignmentLabel.aligned_pair(), augment)
    if mode is TaskMode.FLIP:
        return TrainingExample(trajectory, flip_stereo(audio), AlignmentLabel.flipped(), augment)
    rotated = rotate_foa(audio, theta)
    return TrainingExample(trajectory, rotated, AlignmentLabel.rotated(theta), augment)
