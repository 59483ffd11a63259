"""
Shared plumbing for CLI subcommands: config resolution, run directories and
manifest loading.
"""

import argparse
import logging
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterator, List, Type, TypeVar

from pydantic import BaseModel, ValidationError

from src.core.config import settings
from src.core.errors import ConfigError
from src.models.audio import AudioClip, SourceTrajectory
from src.models.schemas import (
    DatasetManifest,
    GenerationConfig,
    ManifestEntry,
    RunConfig,
    SceneParams,
    Split,
)
from src.services.artifacts import ArtifactError, read_json, write_json
from src.services.audio_io import read_trajectory, read_wav
from src.services.manifest import load_manifest
from src.utils.run_logger import attach_run_logger, detach_run_logger

logger = logging.getLogger(__name__)

P = TypeVar("P", bound=BaseModel)

RUN_CONFIG_FILE = "run_config.json"


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON config block or a run_config.json")
    parser.add_argument("--out", type=Path, help="Output directory")


def _merge(base: Dict[str, Any], updates: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in updates.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _prune(overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Drop flags the user did not pass, recursively."""
    pruned: Dict[str, Any] = {}
    for key, value in overrides.items():
        if isinstance(value, dict):
            value = _prune(value)
            if value:
                pruned[key] = value
        elif value is not None:
            pruned[key] = value
    return pruned


def load_config_block(path: Path | None, command: str) -> Dict[str, Any]:
    """
    Read a bare parameter block, or the params of a run_config.json.

    Raises:
        ConfigError: unreadable file, or a run config written by another command
    """
    if path is None:
        return {}
    try:
        raw = read_json(path)
    except ArtifactError as e:
        raise ConfigError(f"cannot read config: {e}")
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    if {"command", "params"} <= raw.keys():
        run_config = RunConfig.model_validate(raw)
        if run_config.command != command:
            raise ConfigError(
                f"{path} was written by '{run_config.command}', not '{command}'",
                code="command_mismatch",
            )
        return run_config.params
    return raw


def resolve_params(
    model: Type[P], config_path: Path | None, command: str, overrides: Dict[str, Any]
) -> P:
    """Defaults, then the config file, then explicit flags."""
    data = _merge(load_config_block(config_path, command), _prune(overrides))
    try:
        return model.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first.get("loc", ()))
        raise ConfigError(f"invalid {command} config: {location}: {first.get('msg', '')}")


def output_dir(args: argparse.Namespace, command: str) -> Path:
    return Path(args.out) if args.out else Path(settings.output_dir) / command


@contextmanager
def command_run(out_dir: Path, command: str, params: BaseModel) -> Iterator[Path]:
    """
    Run a command body with warnings captured, then echo its resolved config.

    The config is written even when the body fails, so a failed run can be
    replayed with `--config <out>/run_config.json`.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    handler = attach_run_logger()
    try:
        yield out_dir
    finally:
        detach_run_logger(handler)
        write_json(
            RunConfig(command=command, params=params.model_dump(mode="json")),
            out_dir / RUN_CONFIG_FILE,
        )
        handler.write(out_dir)


def scene_params_for(manifest_path: Path, override: SceneParams | None = None) -> SceneParams:
    """Scene parameters the manifest was generated with, read from its run_config.json."""
    if override is not None:
        return override
    run_config_path = Path(manifest_path).parent / RUN_CONFIG_FILE
    if run_config_path.exists():
        raw = read_json(run_config_path)
        if isinstance(raw, dict) and raw.get("command") == "gen":
            try:
                return GenerationConfig.model_validate(raw.get("params", {})).scene
            except ValidationError:
                logger.warning(f"⚠️  Ignoring unreadable generation config {run_config_path}")
    return SceneParams()


@dataclass(frozen=True)
class LoadedEntry:
    entry: ManifestEntry
    audio: AudioClip
    trajectory: SourceTrajectory


def load_entries(
    manifest_path: Path, split: Split, aligned_only: bool = True
) -> tuple[DatasetManifest, List[LoadedEntry]]:
    """
    Entries of one split with their audio and trajectory, in manifest order.

    Raises:
        AudioError: a trajectory leaves the azimuth range of its clip layout
    """
    manifest_path = Path(manifest_path)
    manifest = load_manifest(manifest_path)
    base_dir = manifest_path.parent
    loaded: List[LoadedEntry] = []
    for entry in manifest.split(split):
        if aligned_only and not entry.label.aligned:
            continue
        audio = read_wav(base_dir / entry.audio_path)
        trajectory = read_trajectory(base_dir / entry.trajectory_path)
        trajectory.check_range(audio.layout)
        loaded.append(LoadedEntry(entry, audio, trajectory))
    return manifest, loaded
