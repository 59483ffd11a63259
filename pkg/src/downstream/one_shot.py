"""
One-shot direction classification over 36 azimuth classes using the audio
branch embedding of a trained FOA alignment model.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from src.learning.network import AlignmentModel, AlignmentNetwork
from src.metrics.statistics import circular_error_deg
from src.models.audio import AudioClip, AudioLayout, SourceTrajectory
from src.models.schemas import SceneParams, SourceKind, TrajectoryKind
from src.scenes.synth import encode_foa, sample_source_signal
from .errors import DownstreamError

logger = logging.getLogger(__name__)

N_CLASSES = 36
CLASS_SPACING_DEG = 10.0
EVENT_GAIN_DB = (-40.0, 0.0)


def class_azimuth_deg(index: int) -> float:
    return index * CLASS_SPACING_DEG


@dataclass(frozen=True)
class OneShotResult:
    predictions: np.ndarray
    truths: np.ndarray
    errors_deg: np.ndarray

    @property
    def mean_error_deg(self) -> float:
        return float(np.mean(self.errors_deg))


def one_shot_doa(
    support: np.ndarray,
    support_classes: Sequence[int],
    queries: np.ndarray,
    query_classes: Sequence[int],
) -> OneShotResult:
    """
    Nearest support neighbour (Euclidean) for each query embedding.

    Args:
        support: One pooled embedding per class [36 x h]
        support_classes: Class index of each support row
        queries: Query embeddings [q x h]
        query_classes: True class of each query

    Raises:
        DownstreamError: a class has no support example, or has more than one
    """
    support = np.asarray(support, dtype=np.float64)
    queries = np.asarray(queries, dtype=np.float64)
    classes = np.asarray(support_classes, dtype=np.int64)
    missing = sorted(set(range(N_CLASSES)) - set(classes.tolist()))
    if missing:
        raise DownstreamError(f"support is missing classes {missing}", code="support")
    if classes.size != N_CLASSES:
        raise DownstreamError(f"need one support example per class, got {classes.size}")

    distances = np.linalg.norm(queries[:, None, :] - support[None, :, :], axis=-1)
    predicted = classes[np.argmin(distances, axis=1)]
    truths = np.asarray(query_classes, dtype=np.int64)
    errors = circular_error_deg(predicted * CLASS_SPACING_DEG, truths * CLASS_SPACING_DEG)
    return OneShotResult(predicted, truths, np.atleast_1d(errors))


def sound_event(
    rng: np.random.Generator,
    azimuth_deg: float,
    params: SceneParams | None = None,
    gain_db_range: tuple[float, float] = EVENT_GAIN_DB,
) -> tuple[AudioClip, SourceTrajectory]:
    """A static FOA event: a fresh AM tone at a random level from one direction."""
    params = params or SceneParams(source_kind=SourceKind.AM_TONE)
    source = sample_source_signal(rng, params.source_kind, params.duration_s)
    source = source * 10.0 ** (rng.uniform(*gain_db_range) / 20.0)
    phi = math.radians(azimuth_deg)
    wrapped = math.atan2(math.sin(phi), math.cos(phi))
    trajectory = SourceTrajectory.constant(wrapped, params.duration_s)
    return encode_foa(source, trajectory, params, rng), trajectory


def pooled_embeddings(model: AlignmentModel, clips: Sequence[AudioClip]) -> np.ndarray:
    """Audio-branch activations mean-pooled over each clip's active frames."""
    return np.stack([model.audio_embedding(clip).pooled() for clip in clips])


def random_embedding_model(model: AlignmentModel, seed: int) -> AlignmentModel:
    """Freshly initialised network with the trained model's normalization."""
    network = AlignmentNetwork.initialize(
        model.network.audio_dim,
        model.network.traj_dim,
        model.network.hidden,
        np.random.default_rng(seed),
    )
    return model.with_network(network, trained=False)


@dataclass(frozen=True)
class OneShotEvaluation:
    trained: OneShotResult
    random: OneShotResult


def evaluate_one_shot(
    model: AlignmentModel,
    seed: int = 0,
    queries_per_class: int = 2,
    params: SceneParams | None = None,
) -> OneShotEvaluation:
    """
    Build a 36-class support set and novel query events, then score the
    trained embedding and a random-weight embedding on the same clips.
    """
    if model.layout is not AudioLayout.FOA:
        raise DownstreamError("one-shot DOA needs an FOA model", code="layout")
    params = params or SceneParams(
        source_kind=SourceKind.AM_TONE, trajectory_kind=TrajectoryKind.STATIC
    )
    rng = np.random.default_rng(seed)
    support_clips = [sound_event(rng, class_azimuth_deg(c), params)[0] for c in range(N_CLASSES)]
    query_classes: List[int] = [c for c in range(N_CLASSES) for _ in range(queries_per_class)]
    query_clips = [sound_event(rng, class_azimuth_deg(c), params)[0] for c in query_classes]
    classes = list(range(N_CLASSES))

    def score(candidate: AlignmentModel) -> OneShotResult:
        return one_shot_doa(
            pooled_embeddings(candidate, support_clips),
            classes,
            pooled_embeddings(candidate, query_clips),
            query_classes,
        )

    trained = score(model)
    random = score(random_embedding_model(model, seed + 1))
    logger.info(
        f"One-shot DOA: trained {trained.mean_error_deg:.1f} deg, "
        f"random {random.mean_error_deg:.1f} deg"
    )
    return OneShotEvaluation(trained, random)
