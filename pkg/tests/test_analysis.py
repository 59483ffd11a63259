import math

import numpy as np
import pytest

from src.learning.analysis import analyze_embeddings, bin_track, cca_correlation, pca
from src.learning.features import FeatureError
from src.models.audio import AudioLayout
from src.models.schemas import SceneParams
from src.scenes.synth import linear_sweep, render_binaural


def test_pca_components_are_orthonormal_and_sorted(rng):
    x = rng.normal(size=(500, 4)) * np.array([5.0, 2.0, 1.0, 0.5])
    result = pca(x)
    np.testing.assert_allclose(result.components @ result.components.T, np.eye(4), atol=1e-10)
    assert np.all(np.diff(result.explained_variance) <= 0)
    assert result.explained_variance_ratio.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(
        result.projections.var(axis=0, ddof=1), result.explained_variance, rtol=1e-8
    )
    pivots = np.argmax(np.abs(result.components), axis=1)
    assert np.all(result.components[np.arange(4), pivots] > 0)


def test_pca_truncation_and_degenerate_input():
    result = pca(np.ones((10, 3)), k=2)
    assert result.degenerate
    assert result.components.shape == (2, 3)
    np.testing.assert_array_equal(result.explained_variance_ratio, 0.0)


def test_pca_needs_more_samples_than_dimensions(rng):
    with pytest.raises(FeatureError) as excinfo:
        pca(rng.normal(size=(3, 3)))
    assert excinfo.value.code == "pca"


def test_cca_recovers_linear_target(rng):
    x = rng.normal(size=(200, 3))
    target = 2.0 * x[:, 1] - x[:, 2] + 4.0
    projection, record = cca_correlation(x, target)
    np.testing.assert_allclose(projection, target - target.mean(), atol=1e-9)
    assert record.pearson == pytest.approx(1.0)


def test_bin_tracks():
    stereo = bin_track(np.array([0.0, 0.49, 0.51, 1.0]), AudioLayout.STEREO, n_bins=2)
    np.testing.assert_array_equal(stereo, [0, 0, 1, 1])
    angles = np.radians([-179.0, -1.0, 1.0, 179.0])
    foa = bin_track(np.stack([np.cos(angles), np.sin(angles)], axis=1), AudioLayout.FOA, 4)
    np.testing.assert_array_equal(foa, [0, 1, 2, 3])


def test_embeddings_track_azimuth_on_sweeps(stereo_trained, rng):
    model, _ = stereo_trained
    params = SceneParams()
    clips = []
    for i, (start, end) in enumerate([(-80.0, 80.0), (80.0, -80.0), (-60.0, 70.0)]):
        trajectory = linear_sweep(math.radians(start), math.radians(end), params.duration_s)
        source = 0.5 * rng.uniform(-1.0, 1.0, size=3 * 16000)
        clips.append((f"sweep_{i}", render_binaural(source, trajectory, params), trajectory))

    analysis, rows = analyze_embeddings(model, clips)
    assert not analysis.degenerate
    assert abs(analysis.pc1_vs_azimuth.spearman) >= 0.8
    assert abs(analysis.cca_vs_azimuth.spearman) >= 0.8
    assert analysis.led_vs_azimuth.spearman >= 0.9
    assert len(rows) == analysis.n_frames
    assert {row["id"] for row in rows} == {"sweep_0", "sweep_1", "sweep_2"}
    assert all(0 <= row["bin"] < 12 for row in rows)
