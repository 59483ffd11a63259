"""Alignment model: features, network, training and embedding analysis."""

from .analysis import PcaResult, analyze_embeddings, bin_track, cca_correlation, pca
from .features import (
    AudioFeatures,
    FeatureDataset,
    FeatureError,
    FeatureSequence,
    NormStats,
    ablate_channels,
    active_frames,
    assemble_features,
    trajectory_features,
)
from .network import (
    AlignmentModel,
    AlignmentNetwork,
    AudioEmbedding,
    CheckpointError,
    bce_loss,
    extract_audio_embedding,
)
from .registry import ExtractorMetadata, FeatureRegistry
from .trainer import (
    EmptySplitError,
    TrainingDiverged,
    TrainingError,
    accuracy_from_probs,
    epoch_rows,
    evaluate_accuracy,
    featurize_generated,
    featurize_manifest,
    train,
)

__all__ = [
    "AlignmentModel",
    "AlignmentNetwork",
    "AudioEmbedding",
    "AudioFeatures",
    "CheckpointError",
    "EmptySplitError",
    "ExtractorMetadata",
    "FeatureDataset",
    "FeatureError",
    "FeatureRegistry",
    "FeatureSequence",
    "NormStats",
    "PcaResult",
    "TrainingDiverged",
    "TrainingError",
    "ablate_channels",
    "accuracy_from_probs",
    "active_frames",
    "analyze_embeddings",
    "assemble_features",
    "bce_loss",
    "bin_track",
    "cca_correlation",
    "epoch_rows",
    "evaluate_accuracy",
    "extract_audio_embedding",
    "featurize_generated",
    "featurize_manifest",
    "pca",
    "train",
    "trajectory_features",
]
