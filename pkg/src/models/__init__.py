"""Models module initialization."""

from .audio import AudioClip, AudioError, AudioLayout, SourceTrajectory, grid_times, wrap_angle
from .schemas import (
    AlignmentLabel,
    DatasetManifest,
    FeatureMode,
    GenerationConfig,
    ManifestEntry,
    ModelCheckpoint,
    RotationMisalignment,
    RunConfig,
    SceneParams,
    SourceKind,
    Split,
    TaskMode,
    TrainHyper,
    TrainReport,
    TrajectoryKind,
)

__all__ = [
    "AudioClip",
    "AudioError",
    "AudioLayout",
    "SourceTrajectory",
    "grid_times",
    "wrap_angle",
    "AlignmentLabel",
    "DatasetManifest",
    "FeatureMode",
    "GenerationConfig",
    "ManifestEntry",
    "ModelCheckpoint",
    "RotationMisalignment",
    "RunConfig",
    "SceneParams",
    "SourceKind",
    "Split",
    "TaskMode",
    "TrainHyper",
    "TrainReport",
    "TrajectoryKind",
]
