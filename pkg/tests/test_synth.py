import math

import numpy as np
import pytest

from src.dsp.cues import gcc_phat, ild_db
from src.models.audio import AudioLayout
from src.models.schemas import SceneParams, SourceKind, TrajectoryKind
from src.scenes.synth import (
    SceneError,
    add_diffuse_noise,
    linear_sweep,
    render_binaural,
    sample_source_signal,
    sample_trajectory,
    synthesize_scene,
    woodworth_itd_s,
)

from .conftest import static_trajectory


def test_woodworth_itd_at_the_side():
    params = SceneParams()
    expected = 0.0875 / 343.0 * (math.pi / 2 + 1)
    assert woodworth_itd_s(math.pi / 2, params) == pytest.approx(expected)
    assert woodworth_itd_s(0.0, params) == 0.0


def test_binaural_cues_at_plus_ninety(rng):
    source = rng.standard_normal(3 * 16000)
    clip = render_binaural(source, static_trajectory(90.0), SceneParams())
    left, right = clip.samples
    # Right ear leads by about 10.5 samples
    assert gcc_phat(left, right, max_lag=16).lag in (-10, -11)
    assert ild_db(left, right) == pytest.approx(10.0, abs=0.1)


def test_ild_only_rendering_has_no_delay(rng):
    source = rng.standard_normal(16000)
    params = SceneParams(itd_enabled=False, duration_s=1.0)
    clip = render_binaural(source, static_trajectory(-30.0, 1.0), params)
    # -30 degrees: right is 5 dB below left
    np.testing.assert_allclose(clip.samples[1], 10 ** (-5.0 / 20) * clip.samples[0], rtol=1e-9)


@pytest.mark.parametrize("kind", list(SourceKind))
def test_source_signals_peak_at_half_scale(kind):
    x = sample_source_signal(np.random.default_rng(5), kind, 1.0, 16000)
    assert x.shape == (16000,)
    assert np.max(np.abs(x)) == pytest.approx(0.5)


@pytest.mark.parametrize("kind", list(TrajectoryKind))
def test_stereo_trajectories_stay_frontal(kind):
    params = SceneParams(trajectory_kind=kind)
    for seed in range(10):
        trajectory = sample_trajectory(np.random.default_rng(seed), params)
        assert trajectory.covers(0.0, params.duration_s)
        assert np.all(np.abs(trajectory.azimuth_rad) <= math.pi / 2)


def test_foa_random_walk_wraps_into_range():
    params = SceneParams(
        trajectory_kind=TrajectoryKind.RANDOM_WALK,
        random_walk_step_deg=60.0,
        random_walk_max_step_deg=90.0,
    )
    trajectory = sample_trajectory(np.random.default_rng(0), params, AudioLayout.FOA)
    assert np.all(trajectory.azimuth_rad >= -math.pi)
    assert np.all(trajectory.azimuth_rad < math.pi)


def test_linear_sweep_hits_both_endpoints():
    trajectory = linear_sweep(-1.0, 1.0, 2.0)
    assert trajectory.azimuth_rad[0] == -1.0
    assert trajectory.azimuth_rad[-1] == 1.0
    assert trajectory.duration_s >= 2.0


def test_clean_snr_leaves_clip_untouched(rng):
    clip = render_binaural(rng.standard_normal(16000), static_trajectory(10.0, 1.0), SceneParams())
    assert add_diffuse_noise(clip, None, None) is clip
    assert SceneParams(snr_db="inf").snr_db is None


def test_diffuse_noise_matches_requested_snr(rng):
    clip = render_binaural(rng.standard_normal(16000), static_trajectory(10.0, 1.0), SceneParams())
    noisy = add_diffuse_noise(clip, 0.0, np.random.default_rng(1))
    noise_power = np.mean((noisy.samples - clip.samples) ** 2)
    assert noise_power / np.mean(clip.samples**2) == pytest.approx(1.0, rel=0.05)
    with pytest.raises(SceneError) as excinfo:
        add_diffuse_noise(clip, 0.0, None)
    assert excinfo.value.code == "rng"


def test_trajectory_must_cover_the_clip(rng):
    with pytest.raises(SceneError) as excinfo:
        render_binaural(rng.standard_normal(32000), static_trajectory(0.0, 1.0), SceneParams())
    assert excinfo.value.code == "coverage"


def test_scene_synthesis_is_seeded():
    params = SceneParams(source_kind=SourceKind.MIXED, snr_db=10.0, duration_s=1.0)
    a = synthesize_scene(np.random.default_rng(3), params, AudioLayout.FOA)
    b = synthesize_scene(np.random.default_rng(3), params, AudioLayout.FOA)
    assert a.audio.equals(b.audio)
    assert a.trajectory.equals(b.trajectory)
