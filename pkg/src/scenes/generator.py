"""
Deterministic dataset generation.
Every entry draws from its own generator seeded by hash(master_seed, id), so
serial and parallel runs write identical files.
"""

from __future__ import annotations

import hashlib
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, List, TypeVar

import numpy as np

from src.core.config import settings
from src.models.schemas import DatasetManifest, GenerationConfig, ManifestEntry, Split
from src.services.audio_io import write_trajectory, write_wav
from src.services.manifest import save_manifest
from .synth import Scene, synthesize_scene
from .transforms import TrainingExample, make_training_example

logger = logging.getLogger(__name__)

T = TypeVar("T")

AUDIO_DIR = "audio"
TRAJECTORY_DIR = "trajectories"
MANIFEST_FILE = "manifest.json"


def entry_id(index: int) -> str:
    return f"scene_{index:05d}"


def entry_seed(master_seed: int, identifier: str) -> int:
    """First 8 bytes of sha256("master:id") as an unsigned 64-bit seed."""
    digest = hashlib.sha256(f"{master_seed}:{identifier}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def assign_splits(n: int, ratios: tuple[float, float, float], master_seed: int) -> List[Split]:
    """Seeded permutation split with rounded train/val counts; test takes the rest."""
    n_train = int(round(ratios[0] * n))
    n_val = min(int(round(ratios[1] * n)), n - n_train)
    order = np.random.default_rng(master_seed).permutation(n)
    splits = [Split.TEST] * n
    for rank, index in enumerate(order):
        if rank < n_train:
            splits[index] = Split.TRAIN
        elif rank < n_train + n_val:
            splits[index] = Split.VAL
    return splits


@dataclass(frozen=True)
class GeneratedExample:
    id: str
    seed: int
    split: Split
    scene: Scene
    example: TrainingExample


def build_example(config: GenerationConfig, index: int, split: Split) -> GeneratedExample:
    """Render scene `index` and pass it through the pretext transform."""
    identifier = entry_id(index)
    seed = entry_seed(config.master_seed, identifier)
    rng = np.random.default_rng(seed)
    scene = synthesize_scene(rng, config.scene, config.mode.layout)
    example = make_training_example(
        scene.trajectory,
        scene.audio,
        config.mode,
        rng,
        theta_range_rad=config.theta_range_rad,
        negative_prob=config.negative_prob,
        augment_prob=config.joint_augment_prob,
    )
    # Rotated negatives are not float32-exact
    example = replace(example, audio=example.audio.as_float32())
    return GeneratedExample(identifier, seed, split, scene, example)


def map_examples(
    config: GenerationConfig,
    fn: Callable[[GeneratedExample], T],
    workers: int | None = None,
) -> List[T]:
    """
    Build every example and apply fn to it, returning results in id order.
    Examples are discarded after fn, so only fn's results stay in memory.
    """
    splits = assign_splits(config.n, config.split_ratios, config.master_seed)

    def task(index: int) -> T:
        return fn(build_example(config, index, splits[index]))

    max_workers = workers or settings.workers
    if max_workers <= 1:
        return [task(i) for i in range(config.n)]
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        return list(executor.map(task, range(config.n)))


def generate_dataset(
    config: GenerationConfig, out_dir: Path, workers: int | None = None
) -> DatasetManifest:
    """
    Render config.n scenes into out_dir and write manifest.json.

    Layout: audio/<id>.wav (float32), trajectories/<id>.json, manifest.json
    with paths relative to out_dir.
    """
    out_dir = Path(out_dir)
    (out_dir / AUDIO_DIR).mkdir(parents=True, exist_ok=True)
    (out_dir / TRAJECTORY_DIR).mkdir(parents=True, exist_ok=True)

    def write(generated: GeneratedExample) -> ManifestEntry:
        audio_rel = f"{AUDIO_DIR}/{generated.id}.wav"
        trajectory_rel = f"{TRAJECTORY_DIR}/{generated.id}.json"
        write_wav(generated.example.audio, out_dir / audio_rel)
        write_trajectory(generated.example.trajectory, out_dir / trajectory_rel)
        return ManifestEntry(
            id=generated.id,
            audio_path=audio_rel,
            trajectory_path=trajectory_rel,
            label=generated.example.label,
            scene_seed=generated.seed,
            split=generated.split,
        )

    entries = map_examples(config, write, workers)
    manifest = DatasetManifest(entries=entries)
    save_manifest(manifest, out_dir / MANIFEST_FILE)

    negatives = sum(1 for e in entries if not e.label.aligned)
    logger.info(
        f"✅ Generated {len(entries)} {config.mode.value} scenes "
        f"({negatives} misaligned), splits {manifest.split_counts()}"
    )
    return manifest
