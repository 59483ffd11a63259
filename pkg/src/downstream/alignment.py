"""
Rotation alignment: recover the azimuth offset between FOA audio and its
trajectory by scoring de-rotated candidates with the alignment model.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List

import numpy as np
from scipy.special import softmax

from src.learning.features import FeatureDataset, FeatureSequence, assemble_features
from src.learning.network import AlignmentModel
from src.learning.registry import FeatureRegistry
from src.metrics.statistics import circular_error_deg
from src.models.audio import AudioClip, AudioLayout, SourceTrajectory, grid_times
from src.models.schemas import AlignClipResult
from src.scenes.transforms import rotate_foa
from .errors import DownstreamError

logger = logging.getLogger(__name__)

WINDOW_S = 3.0


@dataclass(frozen=True)
class AlignmentEstimate:
    candidates_deg: np.ndarray
    scores: np.ndarray
    theta_hat_deg: float
    confidence: float
    error_deg: float | None = None
    weighted_error_deg: float | None = None

    def to_result(self, clip_id: str, true_theta_deg: float | None = None) -> AlignClipResult:
        return AlignClipResult(
            id=clip_id,
            theta_hat_deg=self.theta_hat_deg,
            confidence=self.confidence,
            true_theta_deg=true_theta_deg,
            error_deg=self.error_deg,
            weighted_error_deg=self.weighted_error_deg,
        )


def candidate_grid(grid_deg: float) -> np.ndarray:
    """Candidate rotations 0, grid, 2*grid, ... below 360 degrees."""
    if not 0 < grid_deg <= 180:
        raise DownstreamError(f"grid_deg must be in (0, 180], got {grid_deg}", code="grid")
    return np.arange(int(math.ceil(360.0 / grid_deg - 1e-9))) * grid_deg


def _windows(
    clip: AudioClip, trajectory: SourceTrajectory, window_s: float
) -> List[tuple[AudioClip, SourceTrajectory]]:
    """Consecutive non-overlapping windows; a short clip is one window."""
    size = int(round(window_s * clip.sample_rate_hz))
    count = max(1, clip.n_samples // size)
    if clip.n_samples < size:
        return [(clip, trajectory)]
    pieces = []
    for i in range(count):
        start = i * size
        piece = clip.with_samples(clip.samples[:, start : start + size])
        times = grid_times(piece.duration_s)
        offset = start / clip.sample_rate_hz
        pieces.append((piece, SourceTrajectory(times, trajectory.azimuth_at(times + offset))))
    return pieces


def scramble_weights(model: AlignmentModel, seed: int) -> AlignmentModel:
    """Null control: every parameter tensor shuffled in place of the trained one."""
    return model.with_network(model.network.scrambled(np.random.default_rng(seed)))


def rotation_alignment(
    clip: AudioClip,
    trajectory: SourceTrajectory,
    model: AlignmentModel,
    grid_deg: float = 10.0,
    true_theta_deg: float | None = None,
    window_s: float = WINDOW_S,
) -> AlignmentEstimate:
    """
    Score every candidate rotation and return the best.

    For each candidate theta the audio is de-rotated by theta and scored over
    all windows; score(theta) is the mean log-odds. The first maximum wins, so
    ties resolve toward the smaller angle. Confidence is best minus median score.

    Raises:
        DownstreamError: untrained model or non-FOA audio
    """
    if not model.trained:
        raise DownstreamError("rotation alignment needs a trained model", code="untrained")
    if clip.layout is not AudioLayout.FOA or model.layout is not AudioLayout.FOA:
        raise DownstreamError("rotation alignment needs FOA audio and an FOA model", code="layout")

    candidates = candidate_grid(grid_deg)
    windows = _windows(clip, trajectory, window_s)
    sequences: List[FeatureSequence] = []
    for theta in candidates:
        for piece, piece_trajectory in windows:
            derotated = rotate_foa(piece, -math.radians(theta))
            sequences.append(
                assemble_features(
                    piece_trajectory, derotated, model.feature_mode, model.hyper.ablate_channels
                )
            )

    dataset = FeatureDataset.from_sequences(
        sequences,
        [0] * len(sequences),
        [f"{i}" for i in range(len(sequences))],
        AudioLayout.FOA,
        FeatureRegistry.get(model.feature_mode).dim(AudioLayout.FOA),
    )
    scores = model.logits(dataset).reshape(candidates.size, len(windows)).mean(axis=1)
    best = int(np.argmax(scores))
    theta_hat = float(candidates[best])
    confidence = float(scores[best] - np.median(scores))

    error = weighted = None
    if true_theta_deg is not None:
        error = float(circular_error_deg(theta_hat, true_theta_deg))
        errors = circular_error_deg(candidates, true_theta_deg)
        weighted = float(np.sum(softmax(scores) * errors))
    return AlignmentEstimate(candidates, scores, theta_hat, confidence, error, weighted)
