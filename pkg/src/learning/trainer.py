"""
Featurization of datasets and the SGD training loop for the alignment model.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Sequence, TypeVar

import numpy as np

from src.core.config import settings
from src.core.errors import SpatialLabError
from src.dsp.stft import StftParams
from src.models.audio import AudioLayout
from src.models.schemas import (
    DatasetManifest,
    EpochRecord,
    FeatureMode,
    GenerationConfig,
    ManifestEntry,
    Split,
    TrainHyper,
    TrainReport,
)
from src.scenes.generator import GeneratedExample, map_examples
from src.services.audio_io import read_trajectory, read_wav
from .features import FeatureDataset, FeatureError, FeatureSequence, NormStats, assemble_features
from .network import AlignmentModel, AlignmentNetwork
from .registry import FeatureRegistry

logger = logging.getLogger(__name__)

T = TypeVar("T")


class TrainingError(SpatialLabError):
    code = "training"


class EmptySplitError(TrainingError):
    code = "empty_split"

    def __init__(self, split: Split | str):
        name = split.value if isinstance(split, Split) else split
        super().__init__(f"empty split: {name}")
        self.split = name


class TrainingDiverged(TrainingError):
    """Loss became non-finite; carries the report up to the failing epoch."""

    code = "diverged"

    def __init__(self, message: str, report: TrainReport):
        super().__init__(message)
        self.report = report


# ---------------------------------------------------------------------------
# Featurization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Featurized:
    id: str
    split: Split
    y: int
    layout: AudioLayout
    sequence: FeatureSequence


def _parallel_map(
    fn: Callable[[ManifestEntry], T], items: Sequence[ManifestEntry], workers: int
) -> List[T]:
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))


def _group(
    featurized: Sequence[_Featurized], mode: FeatureMode, layout: AudioLayout | None = None
) -> Dict[Split, FeatureDataset]:
    layouts = {f.layout for f in featurized}
    if len(layouts) > 1:
        names = sorted(item.value for item in layouts)
        raise FeatureError(f"dataset mixes layouts: {names}", code="layout")
    layout = next(iter(layouts)) if layouts else (layout or AudioLayout.STEREO)
    audio_dim = FeatureRegistry.get(mode).dim(layout)

    datasets: Dict[Split, FeatureDataset] = {}
    for split in Split:
        members = [f for f in featurized if f.split is split]
        datasets[split] = FeatureDataset.from_sequences(
            [f.sequence for f in members],
            [f.y for f in members],
            [f.id for f in members],
            layout,
            audio_dim,
        )
    return datasets


def featurize_manifest(
    manifest: DatasetManifest,
    base_dir: Path,
    mode: FeatureMode = FeatureMode.CUES,
    ablate: Sequence[str] = (),
    workers: int | None = None,
    params: StftParams | None = None,
) -> Dict[Split, FeatureDataset]:
    """
    Read every entry's audio and trajectory and assemble its features.

    Args:
        manifest: Loaded dataset manifest
        base_dir: Directory the manifest's relative paths resolve against
        mode: Audio front end
        ablate: Channel names zeroed before feature extraction
        workers: Parallel readers; results keep manifest order

    Returns:
        One padded FeatureDataset per split (possibly empty)
    """
    base_dir = Path(base_dir)
    params = params or StftParams()

    def featurize(entry: ManifestEntry) -> _Featurized:
        audio = read_wav(base_dir / entry.audio_path)
        trajectory = read_trajectory(base_dir / entry.trajectory_path)
        trajectory.check_range(audio.layout)
        sequence = assemble_features(trajectory, audio, mode, ablate, params)
        return _Featurized(entry.id, entry.split, entry.label.y, audio.layout, sequence)

    featurized = _parallel_map(featurize, manifest.entries, workers or settings.workers)
    logger.info(f"Featurized {len(featurized)} entries ({mode.value})")
    return _group(featurized, mode)


def featurize_generated(
    config: GenerationConfig,
    mode: FeatureMode = FeatureMode.CUES,
    ablate: Sequence[str] = (),
    workers: int | None = None,
    params: StftParams | None = None,
) -> Dict[Split, FeatureDataset]:
    """Featurize a generation config in memory, without writing audio to disk."""
    params = params or StftParams()

    def featurize(generated: GeneratedExample) -> _Featurized:
        example = generated.example
        sequence = assemble_features(example.trajectory, example.audio, mode, ablate, params)
        return _Featurized(
            generated.id, generated.split, example.label.y, example.audio.layout, sequence
        )

    return _group(map_examples(config, featurize, workers), mode, config.mode.layout)


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------


def accuracy_from_probs(probs: np.ndarray, y: np.ndarray) -> float:
    """Fraction correct with the decision threshold p >= 0.5 -> aligned."""
    if len(y) == 0:
        raise EmptySplitError("evaluation")
    predictions = (np.asarray(probs) >= 0.5).astype(np.float64)
    return float(np.mean(predictions == np.asarray(y, dtype=np.float64)))


def evaluate_accuracy(model: AlignmentModel, dataset: FeatureDataset) -> float:
    if dataset.n == 0:
        raise EmptySplitError("evaluation")
    return accuracy_from_probs(model.predict_proba(dataset), dataset.y)


def train(
    datasets: Dict[Split, FeatureDataset], hyper: TrainHyper | None = None
) -> tuple[AlignmentModel, TrainReport]:
    """
    Mini-batch SGD with momentum on the mean cross-entropy.

    The shuffling schedule and initialisation come from one generator seeded
    with hyper.seed. Training stops when validation accuracy has not improved
    for `patience` epochs after `min_epochs`; the best-validation parameters
    are restored.

    Raises:
        EmptySplitError: train or val split has no entries
        TrainingDiverged: loss or parameters became non-finite
    """
    hyper = hyper or TrainHyper()
    train_set = datasets.get(Split.TRAIN)
    val_set = datasets.get(Split.VAL)
    test_set = datasets.get(Split.TEST)
    if train_set is None or train_set.n == 0:
        raise EmptySplitError(Split.TRAIN)
    if val_set is None or val_set.n == 0:
        raise EmptySplitError(Split.VAL)

    rng = np.random.default_rng(hyper.seed)
    norm = NormStats.fit(train_set.audio, train_set.traj, train_set.mask)
    network = AlignmentNetwork.initialize(
        train_set.audio_dim, train_set.traj_dim, hyper.hidden, rng
    )
    model = AlignmentModel(network, norm, train_set.layout, hyper.feature_mode, hyper)

    audio = norm.apply_audio(train_set.audio)
    traj = norm.apply_traj(train_set.traj)
    velocity = {name: np.zeros_like(value) for name, value in network.params.items()}

    report = TrainReport(
        seed=hyper.seed,
        n_train=train_set.n,
        n_val=val_set.n,
        n_test=test_set.n if test_set is not None else 0,
    )
    best_params = network.copy().params
    best_accuracy = -1.0
    wait = 0

    for epoch in range(1, hyper.epochs + 1):
        order = rng.permutation(train_set.n)
        total = 0.0
        for start in range(0, train_set.n, hyper.batch_size):
            batch = order[start : start + hyper.batch_size]
            penalty = network.penalty(hyper.weight_decay)
            loss, grads = network.loss_and_grad(
                audio[batch],
                traj[batch],
                train_set.mask[batch],
                train_set.y[batch],
                hyper.weight_decay,
            )
            if not math.isfinite(loss):
                report.diverged = True
                logger.error(f"❌ Training diverged at epoch {epoch}")
                raise TrainingDiverged(f"loss became non-finite at epoch {epoch}", report)
            total += (loss - penalty) * batch.size
            for name, grad in grads.items():
                velocity[name] = hyper.momentum * velocity[name] - hyper.lr * grad
                network.params[name] += velocity[name]

        if not all(np.all(np.isfinite(v)) for v in network.params.values()):
            report.diverged = True
            raise TrainingDiverged(f"parameters became non-finite at epoch {epoch}", report)

        val_accuracy = evaluate_accuracy(model, val_set)
        report.epochs.append(
            EpochRecord(epoch=epoch, train_loss=total / train_set.n, val_accuracy=val_accuracy)
        )
        logger.debug(f"epoch {epoch}: loss={total / train_set.n:.4f} val_acc={val_accuracy:.3f}")

        if val_accuracy > best_accuracy:
            best_accuracy = val_accuracy
            best_params = network.copy().params
            report.best_epoch = epoch
            wait = 0
        elif epoch > hyper.min_epochs:
            wait += 1
            if wait >= hyper.patience:
                report.stopped_early = True
                break

    network.params = best_params
    report.best_val_accuracy = best_accuracy
    if test_set is not None and test_set.n > 0:
        report.test_accuracy = evaluate_accuracy(model, test_set)

    logger.info(
        f"✅ Trained {len(report.epochs)} epochs (best {report.best_epoch}): "
        f"val={best_accuracy:.3f} test={report.test_accuracy}"
    )
    return model, report


def epoch_rows(report: TrainReport) -> List[dict]:
    """Report history as CSV rows: epoch, loss, val_acc."""
    return [
        {"epoch": r.epoch, "loss": r.train_loss, "val_acc": r.val_accuracy} for r in report.epochs
    ]
