"""
Pydantic models for manifests, configuration blocks, checkpoints and results.
"""

import math
from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field, field_validator, model_validator

from src.models.audio import AudioLayout

MANIFEST_VERSION = 1
CHECKPOINT_VERSION = 1
RUN_CONFIG_VERSION = 1


class Split(str, Enum):
    """Dataset partitions."""

    TRAIN = "train"
    VAL = "val"
    TEST = "test"


class TaskMode(str, Enum):
    """Pretext task: stereo channel flip or FOA rotation."""

    FLIP = "flip"
    ROTATION = "rotation"

    @property
    def layout(self) -> AudioLayout:
        return AudioLayout.STEREO if self is TaskMode.FLIP else AudioLayout.FOA


class SourceKind(str, Enum):
    """Synthetic source signals."""

    WHITE_NOISE_BURSTS = "white_noise_bursts"
    AM_TONE = "am_tone"
    CLICK_TRAIN = "click_train"
    MIXED = "mixed"


class TrajectoryKind(str, Enum):
    """Synthetic source motion."""

    STATIC = "static"
    LINEAR_SWEEP = "linear_sweep"
    RANDOM_WALK = "random_walk"


class FeatureMode(str, Enum):
    """Audio front ends available to the alignment model."""

    CUES = "cues"
    CUES_GCC = "cues_gcc"
    MEL = "mel"


# ---------------------------------------------------------------------------
# Labels and manifests
# ---------------------------------------------------------------------------


class RotationMisalignment(BaseModel):
    """Audio rotated about the z-axis relative to the trajectory."""

    rotation_rad: float = Field(..., description="Rotation angle normalized to [0, 2*pi)")

    @field_validator("rotation_rad")
    @classmethod
    def normalize_angle(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("rotation angle must be finite")
        return value % (2 * math.pi)


class AlignmentLabel(BaseModel):
    """Pretext label: y=1 aligned, y=0 flipped or rotated."""

    aligned: bool
    misalignment: Union[Literal["none", "flip"], RotationMisalignment] = "none"

    @model_validator(mode="after")
    def check_consistency(self) -> "AlignmentLabel":
        if self.aligned != (self.misalignment == "none"):
            raise ValueError(
                f"aligned={self.aligned} is inconsistent with misalignment={self.kind}"
            )
        return self

    @classmethod
    def aligned_pair(cls) -> "AlignmentLabel":
        return cls(aligned=True, misalignment="none")

    @classmethod
    def flipped(cls) -> "AlignmentLabel":
        return cls(aligned=False, misalignment="flip")

    @classmethod
    def rotated(cls, theta_rad: float) -> "AlignmentLabel":
        return cls(aligned=False, misalignment=RotationMisalignment(rotation_rad=theta_rad))

    @property
    def kind(self) -> str:
        if isinstance(self.misalignment, RotationMisalignment):
            return "rotation"
        return self.misalignment

    @property
    def theta_rad(self) -> Optional[float]:
        if isinstance(self.misalignment, RotationMisalignment):
            return self.misalignment.rotation_rad
        return None

    @property
    def y(self) -> int:
        return 1 if self.aligned else 0


class ManifestEntry(BaseModel):
    """One scene: audio + trajectory file pair with its label."""

    id: str = Field(..., min_length=1)
    audio_path: str = Field(..., description="WAV path relative to the manifest directory")
    trajectory_path: str = Field(..., description="JSON path relative to the manifest directory")
    label: AlignmentLabel
    scene_seed: int = Field(..., ge=0, lt=2**64)
    split: Split


class DatasetManifest(BaseModel):
    """Dataset D = {(trajectory, audio, label)}."""

    version: int = MANIFEST_VERSION
    entries: List[ManifestEntry] = []

    @model_validator(mode="after")
    def check_unique_ids(self) -> "DatasetManifest":
        seen: set[str] = set()
        for entry in self.entries:
            if entry.id in seen:
                raise ValueError(f"duplicate entry id: {entry.id}")
            seen.add(entry.id)
        return self

    def split(self, split: Split) -> List[ManifestEntry]:
        return [e for e in self.entries if e.split is split]

    def split_counts(self) -> Dict[str, int]:
        return {s.value: len(self.split(s)) for s in Split}


# ---------------------------------------------------------------------------
# Configuration blocks
# ---------------------------------------------------------------------------


class SceneParams(BaseModel):
    """Synthetic scene parameters."""

    duration_s: float = Field(default=3.0, gt=0)
    source_kind: SourceKind = SourceKind.WHITE_NOISE_BURSTS
    trajectory_kind: TrajectoryKind = TrajectoryKind.STATIC
    snr_db: Optional[float] = Field(default=None, description="Diffuse-noise SNR; None is clean")
    head_radius_m: float = Field(default=0.0875, gt=0)
    speed_of_sound_mps: float = Field(default=343.0, gt=0)
    ild_max_db: float = Field(default=10.0, ge=0)
    itd_enabled: bool = True
    gain_db_range: Tuple[float, float] = (0.0, 0.0)
    azimuth_range_deg: Optional[Tuple[float, float]] = Field(
        default=None, description="Azimuth sampling range; None uses the layout's full range"
    )
    random_walk_step_deg: float = Field(default=5.0, gt=0)
    random_walk_max_step_deg: float = Field(default=15.0, gt=0)

    @field_validator("snr_db", mode="before")
    @classmethod
    def map_infinite_snr(cls, value: Any) -> Any:
        if value is None:
            return None
        if isinstance(value, str) and value.strip().lower() in ("inf", "+inf", "clean"):
            return None
        if isinstance(value, (int, float)) and math.isinf(value) and value > 0:
            return None
        return value

    @field_validator("snr_db")
    @classmethod
    def check_snr(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and (not math.isfinite(value) or value < 0):
            raise ValueError("snr_db must be >= 0 or +inf")
        return value

    @field_validator("gain_db_range", "azimuth_range_deg")
    @classmethod
    def check_ordered(cls, value: Optional[Tuple[float, float]]) -> Optional[Tuple[float, float]]:
        if value is not None and value[0] > value[1]:
            raise ValueError(f"range must be ordered low <= high, got {value}")
        return value

    @property
    def clean(self) -> bool:
        return self.snr_db is None


class GenerationConfig(BaseModel):
    """Dataset generation block: scene params, counts, mode and master seed."""

    n: int = Field(default=100, ge=1)
    mode: TaskMode = TaskMode.FLIP
    master_seed: int = Field(default=0, ge=0)
    scene: SceneParams = Field(default_factory=SceneParams)
    split_ratios: Tuple[float, float, float] = (0.8, 0.1, 0.1)
    theta_range_rad: Tuple[float, float] = (0.95 * math.pi, 1.05 * math.pi)
    negative_prob: float = Field(default=0.5, ge=0, le=1)
    joint_augment_prob: float = Field(default=0.5, ge=0, le=1)

    @field_validator("split_ratios")
    @classmethod
    def check_ratios(cls, value: Tuple[float, float, float]) -> Tuple[float, float, float]:
        if any(r < 0 for r in value) or not math.isclose(sum(value), 1.0, abs_tol=1e-9):
            raise ValueError(f"split ratios must be non-negative and sum to 1, got {value}")
        return value

    @model_validator(mode="after")
    def check_scene_range(self) -> "GenerationConfig":
        rng = self.scene.azimuth_range_deg
        limit = math.degrees(self.mode.layout.azimuth_limit_rad)
        if rng is not None and (rng[0] < -limit or rng[1] > limit):
            raise ValueError(f"azimuth range {rng} exceeds the {self.mode.layout.value} range")
        return self


class TrainHyper(BaseModel):
    """Alignment model hyperparameters."""

    lr: float = Field(default=0.05, gt=0)
    momentum: float = Field(default=0.9, ge=0, lt=1)
    batch_size: int = Field(default=32, ge=1)
    epochs: int = Field(default=200, ge=1)
    min_epochs: int = Field(default=20, ge=0)
    patience: int = Field(default=5, ge=1)
    weight_decay: float = Field(default=0.0, ge=0)
    hidden: int = Field(default=16, ge=2)
    seed: int = Field(default=0, ge=0)
    feature_mode: FeatureMode = FeatureMode.CUES
    ablate_channels: List[str] = []


# ---------------------------------------------------------------------------
# Training artifacts
# ---------------------------------------------------------------------------


class EpochRecord(BaseModel):
    """train_loss is the mean cross-entropy over the epoch, without the L2 term."""

    epoch: int
    train_loss: float
    val_accuracy: float


class TrainReport(BaseModel):
    """Per-epoch history and final accuracy of one training run."""

    seed: int
    epochs: List[EpochRecord] = []
    best_epoch: int = 0
    best_val_accuracy: float = 0.0
    test_accuracy: Optional[float] = None
    n_train: int = 0
    n_val: int = 0
    n_test: int = 0
    stopped_early: bool = False
    diverged: bool = False


class NormStatsRecord(BaseModel):
    audio_mean: List[float]
    audio_std: List[float]
    traj_mean: List[float]
    traj_std: List[float]


class ModelCheckpoint(BaseModel):
    """Serialized alignment model. Matrices are nested row-major lists."""

    format_version: int = CHECKPOINT_VERSION
    layout: AudioLayout
    feature_mode: FeatureMode
    audio_dim: int
    traj_dim: int
    hidden: int
    params: Dict[str, List[Any]]
    norm_stats: NormStatsRecord
    hyper: TrainHyper
    seed: int
    trained: bool = True


# ---------------------------------------------------------------------------
# Result records
# ---------------------------------------------------------------------------


class AccuracyResult(BaseModel):
    split: Split
    n: int
    accuracy: float
    base_rate: float


class CorrelationRecord(BaseModel):
    pearson: Optional[float] = None
    spearman: Optional[float] = None
    defined: bool = True


class AnalysisResult(BaseModel):
    """PCA and correlation analysis of audio embeddings."""

    n_frames: int
    explained_variance_ratio: List[float]
    degenerate: bool = False
    pc1_vs_azimuth: CorrelationRecord
    cca_vs_azimuth: CorrelationRecord
    led_vs_azimuth: Optional[CorrelationRecord] = None


class DoaClipResult(BaseModel):
    id: str
    method: Literal["gcc", "intensity"]
    median_azimuth_deg: Optional[float]
    mean_error_deg: Optional[float]
    flagged_frames: int
    n_frames: int


class AlignClipResult(BaseModel):
    id: str
    theta_hat_deg: float
    confidence: float
    true_theta_deg: Optional[float] = None
    error_deg: Optional[float] = None
    weighted_error_deg: Optional[float] = None


class UpmixClipResult(BaseModel):
    id: str
    method: Literal["oracle", "learned"]
    l1_complex: float
    baseline_l1: float


class SeparationPairResult(BaseModel):
    id_a: str
    id_b: str
    l1_magnitude: Tuple[float, float]
    mixture_baseline_l1: Tuple[float, float]
    ideal_mask_l1: Tuple[float, float]
    degenerate: bool


class RunConfig(BaseModel):
    """Resolved configuration echoed beside every command's outputs."""

    command: str
    version: int = RUN_CONFIG_VERSION
    params: Dict[str, Any] = {}


# ---------------------------------------------------------------------------
# Command parameter blocks
# ---------------------------------------------------------------------------


class TrainParams(BaseModel):
    """`train`: fit an alignment model on a generated manifest."""

    manifest: str
    hyper: TrainHyper = Field(default_factory=TrainHyper)
    scramble_labels: bool = Field(
        default=False, description="Permute training labels (chance-level control)"
    )


class EvalParams(BaseModel):
    manifest: str
    checkpoint: str
    splits: List[Split] = [Split.TRAIN, Split.VAL, Split.TEST]


class AnalyzeParams(BaseModel):
    manifest: str
    checkpoint: str
    split: Split = Split.TEST
    n_bins: int = Field(default=12, ge=2)


class DoaParams(BaseModel):
    """`doa`: signal-processing DOA, plus one-shot DOA when an FOA checkpoint is given."""

    manifest: str
    split: Split = Split.TEST
    checkpoint: Optional[str] = None
    seed: int = Field(default=0, ge=0)
    queries_per_class: int = Field(default=2, ge=1)
    scene: Optional[SceneParams] = None


class AlignParams(BaseModel):
    """`align`: recover a known synthetic rotation of aligned FOA clips."""

    manifest: str
    checkpoint: str
    split: Split = Split.TEST
    grid_deg: float = Field(default=10.0, gt=0, le=180)
    seed: int = Field(default=0, ge=0)
    null_control: bool = True


class UpmixParams(BaseModel):
    manifest: str
    split: Split = Split.TEST
    epochs: int = Field(default=60, ge=1)
    lr: float = Field(default=0.01, gt=0)
    seed: int = Field(default=0, ge=0)
    write_audio: bool = False
    scene: Optional[SceneParams] = None


class SeparateParams(BaseModel):
    """`separate`: mix consecutive aligned stereo clips pairwise and unmix them."""

    manifest: str
    split: Split = Split.TEST
    write_audio: bool = False
    scene: Optional[SceneParams] = None


class ReportParams(BaseModel):
    run_dir: str
