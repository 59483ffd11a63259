"""
Dataset manifest persistence.
"""

import json
import logging
from pathlib import Path

from pydantic import ValidationError

from src.core.errors import SpatialLabError
from src.models.schemas import DatasetManifest
from src.validators import ManifestValidator

logger = logging.getLogger(__name__)


class ManifestError(SpatialLabError):
    """Manifest schema violation, duplicate id or dangling file reference."""

    code = "manifest"


def save_manifest(manifest: DatasetManifest, path: Path) -> Path:
    """Write a manifest as JSON; entry paths stay relative to the manifest directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = manifest.model_dump(mode="json")
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    logger.info(f"Saved manifest with {len(manifest.entries)} entries to {path}")
    return path


def load_manifest(path: Path, check_files: bool = True) -> DatasetManifest:
    """
    Load and validate a manifest.

    Args:
        path: manifest.json
        check_files: Require referenced files to exist and labels to match clip layouts

    Raises:
        ManifestError: unreadable JSON, schema violation, duplicate ids or bad references
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ManifestError(f"manifest not found: {path}", code="not_found")
    except json.JSONDecodeError as e:
        raise ManifestError(f"manifest {path} is not valid JSON: {e}", code="schema")

    try:
        manifest = DatasetManifest.model_validate(raw)
    except ValidationError as e:
        raise ManifestError(f"manifest schema error: {_first_message(e)}", code="schema")

    result = ManifestValidator().validate(manifest, path.parent, check_files=check_files)
    if result.has_errors:
        raise ManifestError(result.format_errors(), code="invalid")
    if result.has_warnings:
        logger.warning(f"Manifest {path.name}:\n{result.format_warnings()}")
    return manifest


def _first_message(error: ValidationError) -> str:
    details = error.errors()
    if not details:
        return str(error)
    first = details[0]
    location = ".".join(str(part) for part in first.get("loc", ()))
    message = first.get("msg", "")
    return f"{location}: {message}" if location else message
