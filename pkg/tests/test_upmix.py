import math

import numpy as np
import pytest

from src.downstream.errors import DownstreamError
from src.downstream.upmix import (
    UpmixExample,
    UpmixMask,
    train_upmix_mask,
    upmix_learned,
    upmix_oracle,
)
from src.metrics.statistics import l1_spec
from src.models.audio import AudioLayout
from src.models.schemas import SceneParams, TrajectoryKind
from src.scenes.synth import linear_sweep, render_binaural, synthesize_scene
from src.scenes.transforms import downmix_to_mono

from .conftest import static_trajectory

ILD_ONLY = SceneParams(itd_enabled=False)


def test_oracle_inverts_ild_only_rendering(white_noise):
    trajectory = linear_sweep(math.radians(-70), math.radians(50), 3.0)
    target = render_binaural(white_noise, trajectory, ILD_ONLY)
    result = upmix_oracle(downmix_to_mono(target), trajectory, target, ILD_ONLY)
    assert result.baseline_l1 > 0
    assert result.l1_complex < 0.5 * result.baseline_l1
    assert result.l1_complex == pytest.approx(0.0, abs=1e-9)


def test_ideal_mask_reproduces_static_scene(white_noise):
    target = render_binaural(white_noise, static_trajectory(40.0), ILD_ONLY)
    example = UpmixExample.from_scene(target, static_trajectory(40.0))
    predicted = UpmixMask.ideal(ILD_ONLY).apply(example.mono, example.traj_feats)
    assert l1_spec(predicted, example.target) == pytest.approx(0.0, abs=1e-9)


def test_upmix_requires_mono_input(white_noise):
    target = render_binaural(white_noise, static_trajectory(0.0), ILD_ONLY)
    with pytest.raises(DownstreamError) as excinfo:
        upmix_oracle(target, static_trajectory(0.0), target)
    assert excinfo.value.code == "layout"


def test_upmix_requires_covering_trajectory(white_noise):
    target = render_binaural(white_noise, static_trajectory(0.0), ILD_ONLY)
    with pytest.raises(DownstreamError) as excinfo:
        upmix_oracle(downmix_to_mono(target), static_trajectory(0.0, 1.0), target)
    assert excinfo.value.code == "coverage"


def test_training_needs_examples():
    with pytest.raises(DownstreamError):
        train_upmix_mask([])


def test_learned_mask_beats_duplication():
    params = SceneParams(trajectory_kind=TrajectoryKind.LINEAR_SWEEP)
    rng = np.random.default_rng(8)
    scenes = [synthesize_scene(rng, params, AudioLayout.STEREO) for _ in range(16)]
    train_scenes, test_scenes = scenes[:10], scenes[10:]

    model = train_upmix_mask(
        [UpmixExample.from_scene(s.audio, s.trajectory) for s in train_scenes], epochs=30
    )
    # Right gets louder as the source moves right, so the left mask weight is negative
    assert model.a < 0
    assert min(model.history) < 1.0

    learned = baseline = 0.0
    for scene in test_scenes:
        result = upmix_learned(model, downmix_to_mono(scene.audio), scene.trajectory, scene.audio)
        learned += result.l1_complex
        baseline += result.baseline_l1
    assert learned < baseline


def test_oracle_learned_and_duplication_order_per_scene():
    params = ILD_ONLY.model_copy(update={"trajectory_kind": TrajectoryKind.LINEAR_SWEEP})
    rng = np.random.default_rng(17)
    scenes = [synthesize_scene(rng, params, AudioLayout.STEREO) for _ in range(30)]
    model = train_upmix_mask(
        [UpmixExample.from_scene(s.audio, s.trajectory) for s in scenes[:10]], epochs=30
    )

    ordered = []
    for scene in scenes[10:]:
        mono = downmix_to_mono(scene.audio)
        oracle = upmix_oracle(mono, scene.trajectory, scene.audio, params)
        learned = upmix_learned(model, mono, scene.trajectory, scene.audio)
        ordered.append(oracle.l1_complex <= learned.l1_complex <= learned.baseline_l1)
    assert np.mean(ordered) >= 0.9
