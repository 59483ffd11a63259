"""
Shared fixtures. Trained models and featurized datasets are session-scoped;
everything else is cheap enough to build per test.
"""

import math

import numpy as np
import pytest

from src.learning.trainer import featurize_generated, train
from src.models.audio import AudioClip, AudioLayout, SourceTrajectory
from src.models.schemas import (
    GenerationConfig,
    SceneParams,
    SourceKind,
    Split,
    TaskMode,
    TrainHyper,
    TrajectoryKind,
)

FS = 16000


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def white_noise(rng) -> np.ndarray:
    """Three seconds of unit-variance noise at half scale."""
    x = rng.standard_normal(3 * FS)
    return 0.5 * x / np.max(np.abs(x))


def static_trajectory(azimuth_deg: float, duration_s: float = 3.0) -> SourceTrajectory:
    return SourceTrajectory.constant(math.radians(azimuth_deg), duration_s)


def stereo_clip(left: np.ndarray, right: np.ndarray) -> AudioClip:
    return AudioClip(np.stack([left, right]), FS, AudioLayout.STEREO)


# ---------------------------------------------------------------------------
# Stereo flip task
# ---------------------------------------------------------------------------


STEREO_CONFIG = GenerationConfig(n=2000, mode=TaskMode.FLIP, master_seed=11)
STEREO_HOLDOUT = GenerationConfig(
    n=2000, mode=TaskMode.FLIP, master_seed=12, split_ratios=(0.0, 0.0, 1.0)
)


@pytest.fixture(scope="session")
def stereo_datasets():
    return featurize_generated(STEREO_CONFIG)


@pytest.fixture(scope="session")
def stereo_holdout():
    return featurize_generated(STEREO_HOLDOUT)[Split.TEST]


@pytest.fixture(scope="session")
def stereo_trained(stereo_datasets):
    """(model, report) for the clean stereo flip task."""
    return train(stereo_datasets, TrainHyper(seed=0))


# ---------------------------------------------------------------------------
# FOA rotation task
# ---------------------------------------------------------------------------


FOA_SCENE = SceneParams(source_kind=SourceKind.AM_TONE, trajectory_kind=TrajectoryKind.STATIC)
FOA_CONFIG = GenerationConfig(n=1000, mode=TaskMode.ROTATION, master_seed=21, scene=FOA_SCENE)
FOA_HOLDOUT = GenerationConfig(
    n=1000,
    mode=TaskMode.ROTATION,
    master_seed=22,
    scene=FOA_SCENE,
    split_ratios=(0.0, 0.0, 1.0),
)
FOA_HYPER = TrainHyper(seed=0, weight_decay=1e-2)


@pytest.fixture(scope="session")
def foa_datasets():
    return featurize_generated(FOA_CONFIG)


@pytest.fixture(scope="session")
def foa_trained(foa_datasets):
    return train(foa_datasets, FOA_HYPER)


@pytest.fixture(scope="session")
def foa_model(foa_trained):
    return foa_trained[0]
