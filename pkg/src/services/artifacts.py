"""
JSON and CSV artifact writers for command outputs.
Output is key-sorted and timestamp-free so reruns are byte-identical.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List

import numpy as np
import pandas as pd
from pydantic import BaseModel

from src.core.errors import SpatialLabError

logger = logging.getLogger(__name__)


class ArtifactError(SpatialLabError):
    code = "artifact"


def _to_jsonable(payload: Any) -> Any:
    if isinstance(payload, BaseModel):
        return _to_jsonable(payload.model_dump(mode="json"))
    if isinstance(payload, dict):
        return {str(k): _to_jsonable(v) for k, v in payload.items()}
    if isinstance(payload, (list, tuple)):
        return [_to_jsonable(v) for v in payload]
    if isinstance(payload, float) and not math.isfinite(payload):
        return None
    if isinstance(payload, np.ndarray):
        return _to_jsonable(payload.tolist())
    if isinstance(payload, np.generic):
        return _to_jsonable(payload.item())
    return payload


def write_json(payload: Any, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(_to_jsonable(payload), indent=2, sort_keys=True, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def read_json(path: Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ArtifactError(f"file not found: {path}", code="not_found")
    except json.JSONDecodeError as e:
        raise ArtifactError(f"{path} is not valid JSON: {e}")


def write_csv(rows: Iterable[Dict[str, Any]], path: Path, columns: List[str] | None = None) -> Path:
    """Write records as CSV with a fixed column order and float format."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame([_to_jsonable(row) for row in rows], columns=columns)
    frame.to_csv(path, index=False, float_format="%.6g", lineterminator="\n")
    return path


def read_csv(path: Path) -> pd.DataFrame:
    try:
        return pd.read_csv(path)
    except FileNotFoundError:
        raise ArtifactError(f"file not found: {path}", code="not_found")
