import numpy as np
import pytest

from src.dsp.cues import gcc_phat, gcc_phat_frames, gcc_summary, ild_db, led, stereo_cues
from src.dsp.foa import foa_cross_features, intensity_azimuth, intensity_vector
from src.dsp.mel import MelParams, hz_to_mel, log_mel, mel_filterbank
from src.dsp.stft import DspError, StftParams, istft, stft, stft_clip
from src.models.audio import AudioClip, AudioLayout
from src.scenes.transforms import flip_stereo, mix_clips

from .conftest import FS, stereo_clip


def test_stft_shape_and_frame_times():
    params = StftParams()
    bins = stft(np.zeros(FS), params)
    assert bins.shape == (1 + (FS - 512) // 160, 257)
    assert not np.any(bins)
    assert params.frame_centers_s(2, FS)[1] == pytest.approx((160 + 256) / FS)


def test_istft_reconstructs_interior(white_noise):
    params = StftParams()
    rebuilt = istft(stft(white_noise, params), params, white_noise.size)
    interior = slice(params.window_len, white_noise.size - params.window_len)
    error = np.max(np.abs(rebuilt[interior] - white_noise[interior]))
    assert error / np.max(np.abs(white_noise)) <= 1e-6


def test_zero_input_reconstructs_to_zero():
    params = StftParams()
    assert not np.any(istft(stft(np.zeros(4000), params), params, 4000))


def test_stft_rejects_short_input_and_bad_params():
    with pytest.raises(DspError) as excinfo:
        stft(np.zeros(100))
    assert excinfo.value.code == "too_short"
    with pytest.raises(DspError):
        StftParams(window_len=500)
    with pytest.raises(DspError):
        StftParams(hop=0)


def test_stft_frames_satisfy_parseval(white_noise):
    params = StftParams()
    bins = stft(white_noise, params)
    frames = params.frame_signal(white_noise) * params.window_array()
    power = np.abs(bins) ** 2
    spectral = (power[:, 0] + power[:, -1] + 2 * power[:, 1:-1].sum(axis=1)) / params.window_len
    np.testing.assert_allclose(spectral, np.sum(frames**2, axis=1), rtol=1e-9, atol=1e-9)


def test_stft_is_linear_over_mixtures(white_noise, rng):
    a = stereo_clip(white_noise, 0.5 * white_noise)
    other = 0.3 * rng.standard_normal(white_noise.size)
    b = stereo_clip(-other, other)
    mixed = stft_clip(mix_clips(a, b)).bins
    np.testing.assert_allclose(mixed, stft_clip(a).bins + stft_clip(b).bins, atol=1e-9)


@pytest.mark.parametrize("delay", [-16, -7, -1, 0, 1, 5, 16])
def test_gcc_phat_recovers_integer_delays(rng, delay):
    x = rng.standard_normal(512 + 64)
    left = x[32 : 32 + 512]
    right = x[32 - delay : 32 - delay + 512]
    assert gcc_phat(left, right, max_lag=16).lag == delay


def test_gcc_phat_silent_channel_is_undefined(rng):
    result = gcc_phat(rng.standard_normal(512), np.zeros(512))
    assert result.lag == 0
    assert not result.defined
    assert result.curve.shape == (33,)


def test_gcc_phat_rejects_lag_beyond_frame():
    with pytest.raises(DspError):
        gcc_phat(np.ones(8), np.ones(8), max_lag=8)


def test_gcc_phat_frames_matches_single_frame(rng):
    left = rng.standard_normal((4, 512))
    right = np.roll(left, 3, axis=1)
    lags, curves, defined = gcc_phat_frames(left, right)
    assert defined.all()
    for i in range(4):
        assert lags[i] == gcc_phat(left[i], right[i]).lag


def test_level_cues_on_constructed_gains(rng):
    x = rng.standard_normal(1000)
    assert ild_db(x, np.sqrt(10.0) * x) == pytest.approx(10.0)
    assert led(x, 2.0 * x) == pytest.approx(np.log(4.0))
    assert ild_db(np.zeros(10), np.zeros(10)) == 0.0


def test_stereo_cues_negate_under_flip(white_noise, rng):
    right = np.concatenate([np.zeros(4), white_noise[:-4]]) * 0.5
    clip = stereo_clip(white_noise, right)
    cues, flipped = stereo_cues(clip), stereo_cues(flip_stereo(clip))
    np.testing.assert_array_equal(flipped.itd_s, -cues.itd_s)
    np.testing.assert_array_equal(flipped.ild_db, -cues.ild_db)
    np.testing.assert_array_equal(flipped.led, -cues.led)
    # Right lags by 4 samples: the left ear leads
    np.testing.assert_allclose(cues.itd_s, -4 / FS)
    assert np.all(cues.ild_db < 0)


def test_stereo_cues_require_stereo():
    with pytest.raises(DspError):
        stereo_cues(AudioClip(np.zeros((1, FS)), FS, AudioLayout.MONO))


def test_gcc_summary_mean_lead_sign(white_noise):
    lead = np.concatenate([white_noise[3:], np.zeros(3)])
    summary = gcc_summary(stereo_clip(white_noise, lead))
    assert summary.shape[1] == 3
    # Right leads by 3 samples
    assert np.median(summary[:, 1]) > 0
    assert np.all(summary[:, 2] >= 0)


def test_intensity_vector_points_at_source(white_noise):
    phi = np.radians(120.0)
    channels = [1.0, np.sin(phi), 0.0, np.cos(phi)]
    clip = AudioClip(np.outer(channels, white_noise), FS, AudioLayout.FOA)
    cues = intensity_vector(stft_clip(clip))
    np.testing.assert_allclose(intensity_azimuth(cues), phi, atol=1e-9)


def _foa(white_noise, gains) -> AudioClip:
    return AudioClip(np.outer(gains, white_noise), FS, AudioLayout.FOA)


def test_cross_features_vanish_without_directional_channels(white_noise):
    features = foa_cross_features(stft_clip(_foa(white_noise, [1.0, 0.0, 0.0, 0.0])))
    assert features.shape[-1] == 7
    assert features[..., 0].sum() > 0
    assert not np.any(features[..., 1:])


def test_cross_features_of_x_equal_to_w(white_noise):
    features = foa_cross_features(stft_clip(_foa(white_noise, [1.0, 0.0, 0.0, 1.0])))
    np.testing.assert_allclose(features[..., 5], features[..., 0], rtol=1e-12)
    np.testing.assert_allclose(features[..., 6], 0.0, atol=1e-12)


@pytest.mark.parametrize("azimuth_deg", [30.0, -50.0, 10.0])
def test_cross_features_give_plane_wave_tangent(white_noise, azimuth_deg):
    phi = np.radians(azimuth_deg)
    spec = stft_clip(_foa(white_noise, [1.0, np.sin(phi), 0.0, np.cos(phi)]))
    totals = foa_cross_features(spec).sum(axis=(0, 1))
    assert totals[1] / totals[5] == pytest.approx(np.tan(phi), rel=1e-9)

    cues = intensity_vector(spec)
    np.testing.assert_allclose(cues.iy, foa_cross_features(spec)[..., 1].sum(axis=1))
    np.testing.assert_allclose(cues.ix, foa_cross_features(spec)[..., 5].sum(axis=1))


def test_mel_filterbank_shape_and_peaks():
    fb = mel_filterbank(FS, 512)
    assert fb.shape == (64, 257)
    np.testing.assert_allclose(fb.max(axis=1), 1.0)
    assert hz_to_mel(700.0) == pytest.approx(2595.0 * np.log10(2.0))


def test_mel_rejects_too_many_bands():
    with pytest.raises(DspError):
        mel_filterbank(FS, 512, MelParams(n_mels=300))


def test_log_mel_floor_on_silence():
    spec = stft_clip(AudioClip(np.zeros((2, FS)), FS, AudioLayout.STEREO))
    mel = log_mel(spec)
    assert mel.values.shape == (spec.n_frames, 64, 2)
    np.testing.assert_allclose(mel.values, np.log(1e-10))


def test_log_mel_shifts_additively_under_gain(white_noise):
    clip = stereo_clip(white_noise, 0.5 * white_noise)
    gain = 0.25
    base = log_mel(stft_clip(clip)).values
    scaled = log_mel(stft_clip(clip.with_samples(gain * clip.samples))).values
    np.testing.assert_allclose(scaled - base, 2 * np.log(gain), atol=1e-9)
