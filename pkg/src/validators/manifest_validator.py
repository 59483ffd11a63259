"""
Dataset manifest validator
"""

import logging
from pathlib import Path

from src.models.audio import AudioError, AudioLayout
from src.models.schemas import MANIFEST_VERSION, DatasetManifest, Split
from src.services.audio_io import AudioFormatError, probe_wav, read_trajectory
from .validation_result import ValidationResult

logger = logging.getLogger(__name__)


class ManifestValidator:
    """Checks a parsed manifest against the files it references."""

    def validate(
        self, manifest: DatasetManifest, base_dir: Path, check_files: bool = True
    ) -> ValidationResult:
        """
        Validate manifest invariants.

        Args:
            manifest: Parsed manifest
            base_dir: Directory that entry paths are relative to
            check_files: Also require referenced files to exist and match labels

        Returns:
            ValidationResult with errors and warnings
        """
        errors = []
        warnings = []

        if manifest.version != MANIFEST_VERSION:
            errors.append(
                f"unsupported manifest version {manifest.version} (expected {MANIFEST_VERSION})"
            )

        seen: set[str] = set()
        for entry in manifest.entries:
            if entry.id in seen:
                errors.append(f"duplicate entry id: {entry.id}")
            seen.add(entry.id)

        if check_files:
            for entry in manifest.entries:
                errors.extend(self._check_entry_files(entry, base_dir))

        for split in Split:
            if manifest.entries and not manifest.split(split):
                warnings.append(f"split '{split.value}' is empty")

        is_valid = len(errors) == 0

        if is_valid:
            logger.info(f"✅ Manifest validation passed ({len(manifest.entries)} entries)")
        else:
            logger.error(f"❌ Manifest validation failed with {len(errors)} errors")

        return ValidationResult(valid=is_valid, errors=errors, warnings=warnings)

    def _check_entry_files(self, entry, base_dir: Path) -> list[str]:
        errors = []
        audio_path = base_dir / entry.audio_path
        trajectory_path = base_dir / entry.trajectory_path

        if not trajectory_path.is_file():
            errors.append(f"{entry.id}: trajectory file not found: {entry.trajectory_path}")
        if not audio_path.is_file():
            errors.append(f"{entry.id}: audio file not found: {entry.audio_path}")
            return errors

        try:
            info = probe_wav(audio_path)
        except AudioFormatError as e:
            errors.append(f"{entry.id}: {e}")
            return errors

        layout = AudioLayout.from_channels(info.channels)
        if entry.label.kind == "rotation" and layout is not AudioLayout.FOA:
            errors.append(f"{entry.id}: rotation label on a {layout.value} clip")
        if entry.label.kind == "flip" and layout is not AudioLayout.STEREO:
            errors.append(f"{entry.id}: channel-flip label on a {layout.value} clip")

        if trajectory_path.is_file():
            try:
                read_trajectory(trajectory_path).check_range(layout)
            except (AudioError, AudioFormatError) as e:
                errors.append(f"{entry.id}: {e}")
        return errors
