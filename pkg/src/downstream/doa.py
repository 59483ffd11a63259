"""
Direction-of-arrival estimators: Woodworth inversion of the GCC-PHAT lag
(stereo) and the active intensity vector (FOA).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict

import numpy as np
from scipy import optimize

from src.core.config import settings
from src.dsp.cues import gcc_phat_frames
from src.dsp.foa import intensity_azimuth, intensity_vector
from src.dsp.stft import StftParams, stft_clip
from src.metrics.statistics import circular_error_deg
from src.models.audio import AudioClip, AudioLayout, SourceTrajectory, wrap_angle
from src.models.schemas import DoaClipResult, SceneParams
from .errors import DownstreamError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DoaEstimate:
    """Per-frame azimuth in [-pi, pi), normalized-energy confidence and a flag mask."""

    frame_times_s: np.ndarray
    azimuth_rad: np.ndarray
    confidence: np.ndarray
    flagged: np.ndarray

    @property
    def n_frames(self) -> int:
        return int(self.azimuth_rad.size)

    def usable(self, min_confidence: float | None = None) -> np.ndarray:
        """Unflagged frames at or above the activity threshold."""
        threshold = settings.active_frame_ratio if min_confidence is None else min_confidence
        return ~self.flagged & (self.confidence >= threshold)

    def median_deg(self) -> float | None:
        frames = self.azimuth_rad[self.usable()]
        return math.degrees(float(np.median(frames))) if frames.size else None

    def circular_mean_deg(self) -> float | None:
        frames = self.azimuth_rad[self.usable()]
        if not frames.size:
            return None
        mean = math.atan2(float(np.mean(np.sin(frames))), float(np.mean(np.cos(frames))))
        return math.degrees(mean)

    def mean_error_deg(self, trajectory: SourceTrajectory) -> float | None:
        """Mean circular error against the trajectory over usable frames."""
        usable = self.usable()
        if not np.any(usable):
            return None
        truth = trajectory.azimuth_at(self.frame_times_s[usable])
        errors = circular_error_deg(np.degrees(self.azimuth_rad[usable]), np.degrees(truth))
        return float(np.mean(errors))


def _normalized(energy: np.ndarray) -> np.ndarray:
    peak = float(np.max(energy)) if energy.size else 0.0
    return energy / peak if peak > 0 else np.zeros_like(energy)


def woodworth_inverse(tau_s: float, params: SceneParams) -> tuple[float, bool]:
    """
    Solve (r/c)(phi + sin phi) = tau for phi in [-pi/2, pi/2].

    Returns:
        (phi, clamped); delays beyond the model's maximum clamp to +-pi/2
    """
    scale = params.head_radius_m / params.speed_of_sound_mps
    tau_max = scale * (math.pi / 2 + 1.0)
    if abs(tau_s) >= tau_max:
        return math.copysign(math.pi / 2, tau_s), abs(tau_s) > tau_max
    if tau_s == 0:
        return 0.0, False
    root = optimize.bisect(
        lambda phi: scale * (phi + math.sin(phi)) - tau_s, -math.pi / 2, math.pi / 2, xtol=1e-12
    )
    return float(root), False


def doa_from_gcc(
    clip: AudioClip,
    params: SceneParams | None = None,
    stft_params: StftParams | None = None,
) -> DoaEstimate:
    """
    Per-frame azimuth from the GCC-PHAT lag of a stereo clip.

    Lags beyond the Woodworth maximum are clamped to +-90 degrees and flagged;
    frames with a silent channel are flagged with zero confidence.
    """
    if clip.layout is not AudioLayout.STEREO:
        raise DownstreamError(
            f"GCC DOA needs a stereo clip, got {clip.layout.value}", code="layout"
        )
    params = params or SceneParams()
    stft_params = stft_params or StftParams()

    frames_l = stft_params.frame_signal(clip.samples[0])
    frames_r = stft_params.frame_signal(clip.samples[1])
    lags, _, defined = gcc_phat_frames(frames_l, frames_r)

    solutions: Dict[int, tuple[float, bool]] = {}
    for lag in np.unique(lags):
        solutions[int(lag)] = woodworth_inverse(-float(lag) / clip.sample_rate_hz, params)
    azimuth = np.array([solutions[int(lag)][0] for lag in lags])
    clamped = np.array([solutions[int(lag)][1] for lag in lags], dtype=bool)

    energy = np.sum(frames_l**2, axis=1) + np.sum(frames_r**2, axis=1)
    confidence = np.where(defined, _normalized(energy), 0.0)
    flagged = clamped | ~defined
    if np.any(clamped):
        logger.warning(f"⚠️  {int(clamped.sum())} frames exceed the Woodworth delay range")
    return DoaEstimate(
        frame_times_s=stft_params.frame_centers_s(frames_l.shape[0], clip.sample_rate_hz),
        azimuth_rad=np.where(defined, azimuth, 0.0),
        confidence=confidence,
        flagged=flagged,
    )


def doa_from_intensity(clip: AudioClip, stft_params: StftParams | None = None) -> DoaEstimate:
    """Per-frame azimuth atan2(i_y, i_x) of an FOA clip; zero-energy frames are flagged."""
    if clip.layout is not AudioLayout.FOA:
        raise DownstreamError(
            f"intensity DOA needs an FOA clip, got {clip.layout.value}", code="layout"
        )
    cues = intensity_vector(stft_clip(clip, stft_params or StftParams()))
    silent = cues.energy <= settings.energy_floor
    azimuth = np.where(silent, 0.0, wrap_angle(intensity_azimuth(cues)))
    return DoaEstimate(
        frame_times_s=cues.frame_times_s,
        azimuth_rad=azimuth,
        confidence=np.where(silent, 0.0, _normalized(cues.energy)),
        flagged=silent,
    )


def estimate_doa(
    clip_id: str,
    clip: AudioClip,
    trajectory: SourceTrajectory | None = None,
    params: SceneParams | None = None,
) -> DoaClipResult:
    """Run the estimator matching the clip layout and summarise it."""
    if clip.layout is AudioLayout.STEREO:
        estimate, method = doa_from_gcc(clip, params), "gcc"
        centre = estimate.median_deg()
    else:
        estimate, method = doa_from_intensity(clip), "intensity"
        centre = estimate.circular_mean_deg()
    return DoaClipResult(
        id=clip_id,
        method=method,
        median_azimuth_deg=centre,
        mean_error_deg=estimate.mean_error_deg(trajectory) if trajectory is not None else None,
        flagged_frames=int(estimate.flagged.sum()),
        n_frames=estimate.n_frames,
    )
