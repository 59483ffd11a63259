import math

import numpy as np
import pytest
from scipy.special import expit

from src.learning.features import FeatureError, NormStats
from src.learning.network import AlignmentModel, AlignmentNetwork, CheckpointError, bce_loss
from src.learning.registry import FeatureRegistry
from src.models.audio import AudioLayout
from src.models.schemas import FeatureMode, TrainHyper


@pytest.fixture
def small_batch(rng):
    network = AlignmentNetwork.initialize(3, 2, 4, rng)
    audio = rng.normal(size=(3, 5, 3))
    traj = rng.normal(size=(3, 5, 2))
    mask = np.ones((3, 5), dtype=bool)
    mask[1, 3:] = False
    mask[2, 1:] = False
    y = np.array([1.0, 0.0, 1.0])
    return network, audio, traj, mask, y


def test_gradients_match_central_differences(small_batch):
    network, audio, traj, mask, y = small_batch
    weight_decay, eps = 1e-3, 1e-4
    _, grads = network.loss_and_grad(audio, traj, mask, y, weight_decay)

    for name, value in network.params.items():
        numeric = np.zeros_like(value)
        for index in np.ndindex(value.shape):
            original = value[index]
            value[index] = original + eps
            upper = network.loss(audio, traj, mask, y, weight_decay)
            value[index] = original - eps
            lower = network.loss(audio, traj, mask, y, weight_decay)
            value[index] = original
            numeric[index] = (upper - lower) / (2 * eps)
        scale = max(np.linalg.norm(numeric), np.linalg.norm(grads[name]), 1e-12)
        assert np.linalg.norm(numeric - grads[name]) / scale <= 1e-4, name


def test_masked_frames_do_not_affect_output(small_batch):
    network, audio, traj, mask, _ = small_batch
    perturbed = audio.copy()
    perturbed[~mask] = 100.0
    np.testing.assert_array_equal(
        network.predict_proba(audio, traj, mask), network.predict_proba(perturbed, traj, mask)
    )


def test_bce_clamps_probabilities():
    assert bce_loss(0.0, 1.0) == pytest.approx(-math.log(1e-7))
    assert bce_loss(1.0, 0.0) == pytest.approx(-math.log(1e-7))
    assert bce_loss(0.5, 0.0) == pytest.approx(math.log(2.0))
    assert np.all(np.isfinite(bce_loss(np.array([0.0, 1.0]), np.array([0.0, 1.0]))))


def test_bce_matches_log_likelihood_by_hand():
    logits = np.array([2.0, -1.0, 0.5])
    y = np.array([1.0, 0.0, 0.0])
    expected = np.mean(
        [math.log1p(math.exp(-2.0)), math.log1p(math.exp(-1.0)), math.log1p(math.exp(0.5))]
    )
    assert float(np.mean(bce_loss(expit(logits), y))) == pytest.approx(expected, abs=1e-12)


def test_network_loss_is_plain_cross_entropy_by_default(small_batch):
    network, audio, traj, mask, _ = small_batch
    network.params["w_out"][:] = 0.0
    network.params["b_out"][:] = 0.5
    y = np.array([1.0, 0.0, 0.0])
    expected = np.mean(
        [math.log1p(math.exp(-0.5)), math.log1p(math.exp(0.5)), math.log1p(math.exp(0.5))]
    )

    assert TrainHyper().weight_decay == 0.0
    assert network.loss(audio, traj, mask, y) == pytest.approx(expected, abs=1e-12)
    loss, _ = network.loss_and_grad(audio, traj, mask, y, TrainHyper().weight_decay)
    assert loss == pytest.approx(expected, abs=1e-12)
    penalized = network.loss(audio, traj, mask, y, 1e-2)
    assert penalized - network.penalty(1e-2) == pytest.approx(expected, abs=1e-12)


def test_scrambled_network_permutes_values(small_batch, rng):
    network = small_batch[0]
    scrambled = network.scrambled(rng)
    for name, value in network.params.items():
        np.testing.assert_array_equal(
            np.sort(scrambled.params[name], axis=None), np.sort(value, axis=None)
        )


def test_initialize_rejects_narrow_hidden_layer(rng):
    with pytest.raises(CheckpointError):
        AlignmentNetwork.initialize(3, 2, 1, rng)


def _model(network: AlignmentNetwork) -> AlignmentModel:
    return AlignmentModel(
        network,
        NormStats.identity(network.audio_dim, network.traj_dim),
        AudioLayout.STEREO,
        FeatureMode.CUES,
        TrainHyper(hidden=network.hidden),
    )


def test_checkpoint_round_trip(tmp_path, small_batch):
    network = small_batch[0]
    model = _model(network)
    loaded = AlignmentModel.load(model.save(tmp_path / "checkpoint.json"))
    for name, value in network.params.items():
        np.testing.assert_array_equal(loaded.network.params[name], value)
    assert loaded.layout is AudioLayout.STEREO
    assert loaded.trained


def test_checkpoint_version_mismatch(small_batch):
    checkpoint = _model(small_batch[0]).to_checkpoint()
    stale = checkpoint.model_copy(update={"format_version": checkpoint.format_version + 1})
    with pytest.raises(CheckpointError) as excinfo:
        AlignmentModel.from_checkpoint(stale)
    assert excinfo.value.code == "version"


def test_missing_checkpoint(tmp_path):
    with pytest.raises(CheckpointError) as excinfo:
        AlignmentModel.load(tmp_path / "missing.json")
    assert excinfo.value.code == "not_found"


def test_registry_lookup():
    assert FeatureRegistry.get("cues") is FeatureRegistry.get(FeatureMode.CUES)
    assert {meta.mode for meta in FeatureRegistry.list_available()} == set(FeatureMode)
    with pytest.raises(FeatureError) as excinfo:
        FeatureRegistry.get("spectral_flux")
    assert excinfo.value.code == "feature_mode"
