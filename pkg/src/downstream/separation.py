"""
Two-source separation of a stereo mixture by spatial-cue binary masking,
with the ideal-mask oracle from the same decision family.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from src.core.config import settings
from src.dsp.stft import Spectrogram, StftParams, stft_clip
from src.learning.features import FeatureError, trajectory_features
from src.metrics.statistics import l1_spec
from src.models.audio import AudioClip, AudioLayout, SourceTrajectory
from src.models.schemas import SceneParams, SeparationPairResult
from src.scenes.synth import woodworth_itd_s
from .errors import DownstreamError

logger = logging.getLogger(__name__)

ILD_SCALE_DB = 3.0
A_ONLY, B_ONLY, SHARED = 0, 1, 2


@dataclass(frozen=True)
class SeparationResult:
    """Masked mixture spectrograms per source with L1 magnitude errors."""

    estimates: tuple[Spectrogram, Spectrogram]
    l1_magnitude: tuple[float, float]
    mixture_baseline_l1: tuple[float, float]
    ideal_mask_l1: tuple[float, float]
    owner: np.ndarray
    degenerate: bool = False

    def to_record(self, id_a: str, id_b: str) -> SeparationPairResult:
        return SeparationPairResult(
            id_a=id_a,
            id_b=id_b,
            l1_magnitude=self.l1_magnitude,
            mixture_baseline_l1=self.mixture_baseline_l1,
            ideal_mask_l1=self.ideal_mask_l1,
            degenerate=self.degenerate,
        )


def observed_cues(spec: Spectrogram) -> tuple[np.ndarray, np.ndarray]:
    """Per-bin level difference (dB) and inter-channel phase angle(R conj L)."""
    if spec.layout is not AudioLayout.STEREO:
        raise DownstreamError(
            f"separation needs stereo audio, got {spec.layout.value}", code="layout"
        )
    left, right = spec.channel(0), spec.channel(1)
    eps = settings.energy_floor
    ild = 20.0 * (np.log10(np.abs(right) + eps) - np.log10(np.abs(left) + eps))
    return ild, np.angle(right * np.conj(left))


def expected_cues(
    trajectory: SourceTrajectory, spec: Spectrogram, params: SceneParams
) -> tuple[np.ndarray, np.ndarray]:
    """Renderer prediction per frame: ILD ild_max*sin(phi), phase 2*pi*f*tau(phi)."""
    try:
        _, azimuth = trajectory_features(trajectory, spec.frame_times_s())
    except FeatureError as e:
        raise DownstreamError(str(e), code="coverage")
    ild = params.ild_max_db * np.sin(azimuth)
    tau = woodworth_itd_s(azimuth, params) if params.itd_enabled else np.zeros_like(azimuth)
    phase = 2.0 * np.pi * spec.frequencies_hz()[None, :] * tau[:, None]
    return np.broadcast_to(ild[:, None], phase.shape), phase


def cue_distance(
    observed: tuple[np.ndarray, np.ndarray], expected: tuple[np.ndarray, np.ndarray]
) -> np.ndarray:
    """(dILD / 3 dB)^2 + (1 - cos dPhase) per bin."""
    d_ild = (observed[0] - expected[0]) / ILD_SCALE_DB
    return d_ild**2 + (1.0 - np.cos(observed[1] - expected[1]))


def _masked(mixture: Spectrogram, keep: np.ndarray) -> Spectrogram:
    return mixture.with_bins(mixture.bins * keep[:, :, None])


def _bin_costs(mix_mag: np.ndarray, mag_a: np.ndarray, mag_b: np.ndarray) -> np.ndarray:
    """Summed per-bin L1 over channels for the choices (a only, b only, shared)."""
    cost_a = np.abs(mix_mag - mag_a) + mag_b
    cost_b = mag_a + np.abs(mix_mag - mag_b)
    cost_shared = np.abs(mix_mag - mag_a) + np.abs(mix_mag - mag_b)
    return np.stack([cost_a, cost_b, cost_shared]).sum(axis=-1)


def _errors(
    mixture: Spectrogram, owner: np.ndarray, mag_a: np.ndarray, mag_b: np.ndarray
) -> tuple[tuple[Spectrogram, Spectrogram], tuple[float, float]]:
    keep_a = (owner == A_ONLY) | (owner == SHARED)
    keep_b = (owner == B_ONLY) | (owner == SHARED)
    est_a, est_b = _masked(mixture, keep_a), _masked(mixture, keep_b)
    return (est_a, est_b), (
        l1_spec(np.abs(est_a.bins), mag_a, "magnitude"),
        l1_spec(np.abs(est_b.bins), mag_b, "magnitude"),
    )


def ideal_mask(
    mixture: AudioClip,
    sources: tuple[AudioClip, AudioClip],
    stft_params: StftParams | None = None,
) -> tuple[np.ndarray, tuple[float, float]]:
    """Per-bin choice among (a, b, shared) minimising the summed L1 against the true sources."""
    stft_params = stft_params or StftParams()
    mix = stft_clip(mixture, stft_params)
    mag_a = np.abs(stft_clip(sources[0], stft_params).bins)
    mag_b = np.abs(stft_clip(sources[1], stft_params).bins)
    owner = np.argmin(_bin_costs(np.abs(mix.bins), mag_a, mag_b), axis=0)
    _, errors = _errors(mix, owner, mag_a, mag_b)
    return owner, errors


def separate_spatial(
    mixture: AudioClip,
    trajectory_a: SourceTrajectory,
    trajectory_b: SourceTrajectory,
    sources: tuple[AudioClip, AudioClip],
    params: SceneParams | None = None,
    stft_params: StftParams | None = None,
) -> SeparationResult:
    """
    Assign each time-frequency bin to the source whose expected cue is nearer.

    Exact ties leave the bin in both estimates, so identical trajectories
    return the mixture for both sources; that case is flagged degenerate.

    Args:
        mixture: Stereo sum of the two rendered sources
        trajectory_a: Ground-truth track of source a
        trajectory_b: Ground-truth track of source b
        sources: The two rendered stereo sources, used for scoring only
        params: Renderer parameters used to predict cues
    """
    params = params or SceneParams()
    stft_params = stft_params or StftParams()
    if any(s.layout is not mixture.layout for s in sources):
        raise DownstreamError("mixture and sources must share a layout", code="layout")

    mix = stft_clip(mixture, stft_params)
    observed = observed_cues(mix)
    dist_a = cue_distance(observed, expected_cues(trajectory_a, mix, params))
    dist_b = cue_distance(observed, expected_cues(trajectory_b, mix, params))
    owner = np.where(dist_a < dist_b, A_ONLY, np.where(dist_b < dist_a, B_ONLY, SHARED))

    degenerate = trajectory_a.equals(trajectory_b, atol=1e-9)
    if degenerate:
        logger.warning("⚠️  Sources share a trajectory; spatial separation is degenerate")

    mag_a = np.abs(stft_clip(sources[0], stft_params).bins)
    mag_b = np.abs(stft_clip(sources[1], stft_params).bins)
    estimates, errors = _errors(mix, owner, mag_a, mag_b)
    baseline = (
        l1_spec(np.abs(mix.bins), mag_a, "magnitude"),
        l1_spec(np.abs(mix.bins), mag_b, "magnitude"),
    )
    ideal_owner = np.argmin(_bin_costs(np.abs(mix.bins), mag_a, mag_b), axis=0)
    _, ideal = _errors(mix, ideal_owner, mag_a, mag_b)
    return SeparationResult(estimates, errors, baseline, ideal, owner, degenerate)
