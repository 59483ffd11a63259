"""Downstream evaluations: DOA, one-shot DOA, rotation alignment, upmixing, separation."""

from .alignment import AlignmentEstimate, candidate_grid, rotation_alignment, scramble_weights
from .doa import DoaEstimate, doa_from_gcc, doa_from_intensity, estimate_doa, woodworth_inverse
from .errors import DownstreamError
from .one_shot import (
    N_CLASSES,
    OneShotEvaluation,
    OneShotResult,
    evaluate_one_shot,
    one_shot_doa,
    pooled_embeddings,
    random_embedding_model,
    sound_event,
)
from .separation import SeparationResult, ideal_mask, separate_spatial
from .upmix import (
    UpmixExample,
    UpmixMask,
    UpmixResult,
    duplicate_mono,
    train_upmix_mask,
    upmix_learned,
    upmix_oracle,
)

__all__ = [
    "AlignmentEstimate",
    "DoaEstimate",
    "DownstreamError",
    "N_CLASSES",
    "OneShotEvaluation",
    "OneShotResult",
    "SeparationResult",
    "UpmixExample",
    "UpmixMask",
    "UpmixResult",
    "candidate_grid",
    "doa_from_gcc",
    "doa_from_intensity",
    "duplicate_mono",
    "estimate_doa",
    "evaluate_one_shot",
    "ideal_mask",
    "one_shot_doa",
    "pooled_embeddings",
    "random_embedding_model",
    "rotation_alignment",
    "scramble_weights",
    "separate_spatial",
    "sound_event",
    "train_upmix_mask",
    "upmix_learned",
    "upmix_oracle",
    "woodworth_inverse",
]
