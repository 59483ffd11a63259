import numpy as np
import pytest

from src.learning.trainer import (
    EmptySplitError,
    accuracy_from_probs,
    epoch_rows,
    evaluate_accuracy,
    featurize_generated,
    train,
)
from src.models.schemas import GenerationConfig, SceneParams, Split, TaskMode, TrainHyper

from .conftest import FOA_CONFIG, FOA_HOLDOUT, FOA_HYPER, STEREO_CONFIG

TINY = GenerationConfig(n=60, master_seed=3, scene=SceneParams(duration_s=1.0))


def test_stereo_flip_is_learned(stereo_trained):
    _, report = stereo_trained
    assert report.test_accuracy >= 0.95
    assert report.n_train + report.n_val + report.n_test == STEREO_CONFIG.n
    assert 1 <= report.best_epoch <= len(report.epochs)
    assert not report.diverged


def test_foa_rotation_is_learned(foa_trained):
    _, report = foa_trained
    assert report.test_accuracy >= 0.90


def test_scrambled_labels_stay_at_chance(stereo_datasets, stereo_holdout):
    datasets = dict(stereo_datasets)
    train_set = datasets[Split.TRAIN]
    datasets[Split.TRAIN] = train_set.with_labels(
        np.random.default_rng(0).permutation(train_set.y)
    )
    model, _ = train(datasets, TrainHyper(seed=0))
    assert 0.45 <= evaluate_accuracy(model, stereo_holdout) <= 0.55


def test_omnidirectional_only_input_is_at_chance():
    ablate = ["x", "y", "z"]
    datasets = featurize_generated(FOA_CONFIG, ablate=ablate)
    holdout = featurize_generated(FOA_HOLDOUT, ablate=ablate)[Split.TEST]
    hyper = FOA_HYPER.model_copy(update={"ablate_channels": ablate})
    model, _ = train(datasets, hyper)
    assert evaluate_accuracy(model, holdout) == pytest.approx(0.5, abs=0.05)


@pytest.fixture(scope="module")
def noisy_accuracy():
    """Test accuracy of the stereo flip task trained and tested at each SNR."""

    def run(snr_db: float) -> float:
        scene = STEREO_CONFIG.scene.model_copy(update={"snr_db": snr_db})
        datasets = featurize_generated(STEREO_CONFIG.model_copy(update={"scene": scene}))
        return train(datasets, TrainHyper(seed=0))[1].test_accuracy

    return {snr_db: run(snr_db) for snr_db in (20.0, 0.0)}


def test_noise_does_not_help(stereo_trained, noisy_accuracy):
    clean_accuracy = stereo_trained[1].test_accuracy
    assert 0.55 < noisy_accuracy[0.0] <= clean_accuracy + 0.02


def test_accuracy_falls_with_snr(stereo_trained, noisy_accuracy):
    clean_accuracy = stereo_trained[1].test_accuracy
    assert noisy_accuracy[0.0] <= noisy_accuracy[20.0] + 0.02
    assert noisy_accuracy[20.0] <= clean_accuracy + 0.02


def test_flip_is_learned_without_joint_augmentation(stereo_trained):
    assert STEREO_CONFIG.joint_augment_prob > 0
    assert stereo_trained[1].test_accuracy >= 0.9
    config = STEREO_CONFIG.model_copy(update={"joint_augment_prob": 0.0})
    _, report = train(featurize_generated(config), TrainHyper(seed=0))
    assert report.test_accuracy >= 0.9


def test_training_is_deterministic():
    datasets = featurize_generated(TINY)
    hyper = TrainHyper(seed=4, epochs=8, min_epochs=0)
    model_a, report_a = train(datasets, hyper)
    model_b, report_b = train(datasets, hyper)
    assert report_a == report_b
    for name, value in model_a.network.params.items():
        np.testing.assert_array_equal(model_b.network.params[name], value)
    assert [row["epoch"] for row in epoch_rows(report_a)] == list(
        range(1, len(report_a.epochs) + 1)
    )


def test_empty_train_split_is_rejected():
    config = GenerationConfig(
        n=4, mode=TaskMode.FLIP, scene=SceneParams(duration_s=1.0), split_ratios=(0.0, 0.0, 1.0)
    )
    with pytest.raises(EmptySplitError) as excinfo:
        train(featurize_generated(config))
    assert excinfo.value.code == "empty_split"
    assert "empty split: train" in str(excinfo.value)


def test_accuracy_threshold_and_empty_input():
    accuracy = accuracy_from_probs(np.array([0.5, 0.49, 0.9]), np.array([1, 0, 0]))
    assert accuracy == pytest.approx(2 / 3)
    with pytest.raises(EmptySplitError):
        accuracy_from_probs(np.array([]), np.array([]))
