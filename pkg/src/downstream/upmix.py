"""
Mono-to-stereo upmixing from a trajectory: an oracle that inverts the
renderer, and a learned frequency-independent tanh mask.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from src.dsp.stft import Spectrogram, StftParams, stft_clip
from src.learning.features import FeatureError, trajectory_features
from src.metrics.statistics import l1_spec
from src.models.audio import AudioClip, AudioLayout, SourceTrajectory
from src.models.schemas import SceneParams
from src.scenes.synth import ild_gains, render_binaural
from src.scenes.transforms import downmix_to_mono
from .errors import DownstreamError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class UpmixResult:
    predicted: Spectrogram
    l1_complex: float
    baseline_l1: float


def _require_mono(mono: AudioClip) -> None:
    if mono.layout is not AudioLayout.MONO:
        raise DownstreamError(f"upmix needs a mono clip, got {mono.layout.value}", code="layout")


def _check_coverage(mono: AudioClip, trajectory: SourceTrajectory) -> None:
    if not trajectory.covers(0.0, (mono.n_samples - 1) / mono.sample_rate_hz):
        raise DownstreamError(
            f"trajectory ends at {trajectory.duration_s:.3f} s, "
            f"clip lasts {mono.duration_s:.3f} s",
            code="coverage",
        )


def duplicate_mono(mono_spec: Spectrogram) -> Spectrogram:
    """Baseline prediction: the mono spectrogram on both channels."""
    bins = np.repeat(mono_spec.bins, 2, axis=2)
    return mono_spec.with_bins(bins, AudioLayout.STEREO)


def _score(predicted: Spectrogram, target: AudioClip, mono_spec: Spectrogram) -> UpmixResult:
    target_spec = stft_clip(target, mono_spec.params)
    return UpmixResult(
        predicted,
        l1_spec(predicted, target_spec, "complex"),
        l1_spec(duplicate_mono(mono_spec), target_spec, "complex"),
    )


def upmix_oracle(
    mono: AudioClip,
    trajectory: SourceTrajectory,
    target: AudioClip,
    params: SceneParams | None = None,
    stft_params: StftParams | None = None,
) -> UpmixResult:
    """
    Undo the downmix gain (g_l + g_r)/2 per sample and re-render with the
    known gain/delay model. Exact for clean ILD-only scenes.
    """
    _require_mono(mono)
    _check_coverage(mono, trajectory)
    params = (params or SceneParams()).model_copy(update={"snr_db": None})
    stft_params = stft_params or StftParams()

    azimuth = trajectory.azimuth_at(np.arange(mono.n_samples) / mono.sample_rate_hz)
    gain_l, gain_r = ild_gains(azimuth, params)
    source = mono.samples[0] * 2.0 / (gain_l + gain_r)
    rendered = render_binaural(source, trajectory, params, sample_rate_hz=mono.sample_rate_hz)
    return _score(stft_clip(rendered, stft_params), target, stft_clip(mono, stft_params))


@dataclass
class UpmixMask:
    """m[t] = tanh(a sin(phi) + b cos(phi) + c); L = M(1 + m), R = M(1 - m)."""

    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    history: List[float] = field(default_factory=list)

    @classmethod
    def ideal(cls, params: SceneParams) -> "UpmixMask":
        """Mask that reproduces the renderer's level difference exactly."""
        return cls(a=-math.log(10.0) * params.ild_max_db / 40.0)

    def mask(self, traj_feats: np.ndarray) -> np.ndarray:
        sin_phi, cos_phi = traj_feats[:, 0], traj_feats[:, 1]
        return np.tanh(self.a * sin_phi + self.b * cos_phi + self.c)

    def apply(self, mono_spec: Spectrogram, traj_feats: np.ndarray) -> Spectrogram:
        m = self.mask(traj_feats)[:, None]
        mono = mono_spec.bins[:, :, 0]
        bins = np.stack([mono * (1.0 + m), mono * (1.0 - m)], axis=-1)
        return mono_spec.with_bins(bins, AudioLayout.STEREO)


@dataclass(frozen=True)
class UpmixExample:
    """Mono spectrogram, stereo target and trajectory features on the frame grid."""

    mono: Spectrogram
    target: Spectrogram
    traj_feats: np.ndarray

    @classmethod
    def from_scene(
        cls,
        stereo: AudioClip,
        trajectory: SourceTrajectory,
        stft_params: StftParams | None = None,
    ) -> "UpmixExample":
        if stereo.layout is not AudioLayout.STEREO:
            raise DownstreamError("upmix targets must be stereo", code="layout")
        stft_params = stft_params or StftParams()
        mono = stft_clip(downmix_to_mono(stereo), stft_params)
        try:
            traj_feats, _ = trajectory_features(trajectory, mono.frame_times_s())
        except FeatureError as e:
            raise DownstreamError(str(e), code="coverage")
        return cls(mono, stft_clip(stereo, stft_params), traj_feats)


def _mask_gradient(example: UpmixExample, model: UpmixMask) -> tuple[float, np.ndarray]:
    """Complex-L1 loss normalised by the duplication baseline, and its (a, b, c) subgradient."""
    mono = example.mono.bins[:, :, 0]
    left, right = example.target.bins[:, :, 0], example.target.bins[:, :, 1]
    m = model.mask(example.traj_feats)[:, None]
    diff_l = mono * (1.0 + m) - left
    diff_r = mono * (1.0 - m) - right
    scale = float(np.mean(np.abs((mono - left).real) + np.abs((mono - left).imag)))
    scale += float(np.mean(np.abs((mono - right).real) + np.abs((mono - right).imag)))
    scale = max(scale / 2.0, 1e-12)
    count = 2 * mono.size

    total = np.abs(diff_l.real) + np.abs(diff_l.imag) + np.abs(diff_r.real) + np.abs(diff_r.imag)
    loss = float(np.sum(total)) / (count * scale)
    d_m = (
        mono.real * np.sign(diff_l.real)
        + mono.imag * np.sign(diff_l.imag)
        - mono.real * np.sign(diff_r.real)
        - mono.imag * np.sign(diff_r.imag)
    ).sum(axis=1) / (count * scale)
    d_pre = d_m * (1.0 - m[:, 0] ** 2)
    features = np.column_stack([example.traj_feats, np.ones(len(d_pre))])
    return loss, features.T @ d_pre


def train_upmix_mask(
    examples: Sequence[UpmixExample],
    epochs: int = 60,
    lr: float = 0.01,
    momentum: float = 0.9,
    seed: int = 0,
) -> UpmixMask:
    """
    Subgradient descent with momentum on the complex L1 loss.
    Clips are visited in a seeded order each epoch; the parameters with the
    lowest epoch loss are kept.
    """
    if not examples:
        raise DownstreamError("upmix training needs at least one aligned clip", code="empty_split")
    rng = np.random.default_rng(seed)
    model = UpmixMask()
    theta = np.zeros(3)
    velocity = np.zeros(3)
    best_theta, best_loss = theta.copy(), math.inf

    for _ in range(epochs):
        total = 0.0
        for index in rng.permutation(len(examples)):
            model.a, model.b, model.c = theta
            loss, grad = _mask_gradient(examples[index], model)
            total += loss
            velocity = momentum * velocity - lr * grad
            theta = theta + velocity
        mean_loss = total / len(examples)
        model.history.append(mean_loss)
        if mean_loss < best_loss:
            best_loss, best_theta = mean_loss, theta.copy()

    model.a, model.b, model.c = (float(v) for v in best_theta)
    logger.info(f"Upmix mask a={model.a:.3f} b={model.b:.3f} c={model.c:.3f}")
    return model


def upmix_learned(
    model: UpmixMask,
    mono: AudioClip,
    trajectory: SourceTrajectory,
    target: AudioClip,
    stft_params: StftParams | None = None,
) -> UpmixResult:
    """Apply a trained mask to a mono clip and score it against the stereo target."""
    _require_mono(mono)
    _check_coverage(mono, trajectory)
    stft_params = stft_params or StftParams()
    mono_spec = stft_clip(mono, stft_params)
    traj_feats, _ = trajectory_features(trajectory, mono_spec.frame_times_s())
    return _score(model.apply(mono_spec, traj_feats), target, mono_spec)
