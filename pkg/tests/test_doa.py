import math

import numpy as np
import pytest

from src.downstream.doa import (
    doa_from_gcc,
    doa_from_intensity,
    estimate_doa,
    woodworth_inverse,
)
from src.downstream.errors import DownstreamError
from src.models.audio import AudioClip, AudioLayout
from src.models.schemas import SceneParams
from src.scenes.synth import encode_foa, render_binaural, woodworth_itd_s

from .conftest import FS, stereo_clip, static_trajectory


@pytest.mark.parametrize("azimuth_deg", [-75.0, -20.0, 0.0, 10.0, 60.0])
def test_woodworth_inverse_round_trip(azimuth_deg):
    params = SceneParams()
    phi = math.radians(azimuth_deg)
    solved, clamped = woodworth_inverse(float(woodworth_itd_s(phi, params)), params)
    assert solved == pytest.approx(phi, abs=1e-9)
    assert not clamped


def test_woodworth_inverse_clamps_beyond_maximum():
    params = SceneParams()
    tau_max = float(woodworth_itd_s(math.pi / 2, params))
    assert woodworth_inverse(2 * tau_max, params) == (math.pi / 2, True)
    assert woodworth_inverse(-2 * tau_max, params) == (-math.pi / 2, True)
    assert woodworth_inverse(tau_max, params) == (math.pi / 2, False)


def test_gcc_doa_on_static_source(white_noise):
    trajectory = static_trajectory(30.0)
    clip = render_binaural(white_noise, trajectory, SceneParams())
    result = estimate_doa("a", clip, trajectory)
    assert result.method == "gcc"
    # One-sample lag resolution is about 5 degrees near the front
    assert result.median_azimuth_deg == pytest.approx(30.0, abs=5.0)
    assert result.mean_error_deg <= 5.0
    assert result.flagged_frames == 0


def test_gcc_doa_flags_impossible_delays(white_noise):
    right = np.concatenate([white_noise[14:], np.zeros(14)])
    estimate = doa_from_gcc(stereo_clip(white_noise, right))
    # A 14-sample lead exceeds the head model's range
    assert estimate.flagged.all()
    np.testing.assert_allclose(estimate.azimuth_rad, math.pi / 2)
    assert estimate.median_deg() is None


def test_intensity_doa_on_foa_source(white_noise):
    trajectory = static_trajectory(120.0)
    result = estimate_doa("b", encode_foa(white_noise, trajectory), trajectory)
    assert result.method == "intensity"
    assert result.median_azimuth_deg == pytest.approx(120.0, abs=1e-6)
    assert result.mean_error_deg == pytest.approx(0.0, abs=1e-6)


def test_silent_foa_frames_are_flagged():
    estimate = doa_from_intensity(AudioClip(np.zeros((4, FS)), FS, AudioLayout.FOA))
    assert estimate.flagged.all()
    assert estimate.circular_mean_deg() is None


def test_estimators_check_layout(white_noise):
    foa = encode_foa(white_noise, static_trajectory(0.0))
    with pytest.raises(DownstreamError):
        doa_from_gcc(foa)
    with pytest.raises(DownstreamError):
        doa_from_intensity(stereo_clip(white_noise, white_noise))
