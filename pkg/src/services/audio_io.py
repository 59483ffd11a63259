"""
WAV and trajectory file I/O.
Reads go through soundfile; writes use scipy's WAV writer, which emits no
timestamped chunks, so regenerated datasets hash identically.
"""

import json
import logging
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np
import soundfile as sf
from scipy.io import wavfile

from src.core.config import settings
from src.core.errors import SpatialLabError
from src.models.audio import AudioClip, AudioError, AudioLayout, SourceTrajectory

logger = logging.getLogger(__name__)

SUPPORTED_SUBTYPES = {"PCM_16", "FLOAT"}
SAMPLE_BYTES = {"PCM_16": 2, "FLOAT": 4}
PCM16_SCALE = 32768.0


class AudioFormatError(SpatialLabError):
    """Unreadable, truncated or unsupported audio file."""

    code = "audio_format"


@dataclass(frozen=True)
class WavInfo:
    channels: int
    sample_rate_hz: int
    frames: int
    subtype: str


def _declared_frames(path: Path, block_align: int) -> int | None:
    """Frame count the RIFF data chunk header declares, None when there is no data chunk."""
    with open(path, "rb") as f:
        if f.read(12)[8:] != b"WAVE":
            return None
        while True:
            header = f.read(8)
            if len(header) < 8:
                return None
            chunk_id, size = struct.unpack("<4sI", header)
            if chunk_id == b"data":
                return size // block_align
            f.seek(size + (size & 1), 1)


def probe_wav(path: Path) -> WavInfo:
    """
    Read a WAV header and check it against the supported formats.

    Raises:
        AudioFormatError: unreadable header, non-WAV container, unsupported
            encoding or channel count, or a data chunk shorter than declared
    """
    try:
        info = sf.info(str(path))
    except (RuntimeError, OSError) as e:
        raise AudioFormatError(f"cannot read WAV header of {path}: {e}", code="unreadable")

    if info.format != "WAV":
        raise AudioFormatError(f"{path} is not a RIFF/WAVE file ({info.format})")
    if info.subtype not in SUPPORTED_SUBTYPES:
        raise AudioFormatError(
            f"unsupported encoding {info.subtype} in {path} (PCM_16 or FLOAT only)",
            code="encoding",
        )
    if info.channels not in {layout.channels for layout in AudioLayout}:
        raise AudioFormatError(f"unsupported channel count: {info.channels}", code="channels")

    declared = _declared_frames(Path(path), info.channels * SAMPLE_BYTES[info.subtype])
    if declared is not None and declared > info.frames:
        raise AudioFormatError(
            f"truncated file {path}: header declares {declared} frames, found {info.frames}",
            code="truncated",
        )

    return WavInfo(info.channels, int(info.samplerate), int(info.frames), info.subtype)


def read_wav(path: Path, expected_rate_hz: int | None = None) -> AudioClip:
    """
    Load a WAV file as an AudioClip.

    PCM16 samples are divided by 32768; float32 samples are returned as stored.
    The layout follows the channel count.
    """
    path = Path(path)
    info = probe_wav(path)
    expected = expected_rate_hz or settings.sample_rate_hz
    if info.sample_rate_hz != expected:
        raise AudioFormatError(
            f"sample rate {info.sample_rate_hz} Hz not supported (expected {expected} Hz)",
            code="sample_rate",
        )

    dtype = "int16" if info.subtype == "PCM_16" else "float32"
    try:
        data, rate = sf.read(str(path), dtype=dtype, always_2d=True)
    except (RuntimeError, OSError) as e:
        raise AudioFormatError(f"failed to read samples from {path}: {e}", code="unreadable")

    if data.shape[0] != info.frames:
        raise AudioFormatError(
            f"truncated file {path}: header declares {info.frames} frames, read {data.shape[0]}",
            code="truncated",
        )

    samples = data.T.astype(np.float64)
    if dtype == "int16":
        samples /= PCM16_SCALE

    try:
        return AudioClip(samples, int(rate), AudioLayout.from_channels(info.channels))
    except AudioError as e:
        raise AudioFormatError(f"{path}: {e}")


def write_wav(
    clip: AudioClip, path: Path, encoding: Literal["float32", "pcm16"] = "float32"
) -> Path:
    """
    Write an AudioClip as RIFF/WAVE.

    Args:
        clip: Clip to write
        path: Destination file; parent directories are created
        encoding: "float32" (canonical) or "pcm16". float32 reproduces clips
            whose samples are float32-exact (see AudioClip.as_float32) bit for bit

    Returns:
        The written path
    """
    path = Path(path)
    frames = clip.samples.T

    if encoding == "pcm16":
        clipped = int(np.count_nonzero(np.abs(frames) > 1.0))
        if clipped:
            logger.warning(f"⚠️  Clamped {clipped} samples outside [-1, 1] in {path.name}")
        data = np.clip(np.round(frames * PCM16_SCALE), -32768, 32767).astype(np.int16)
    elif encoding == "float32":
        data = frames.astype(np.float32)
    else:
        raise AudioFormatError(f"unknown encoding: {encoding}", code="encoding")

    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        wavfile.write(str(path), clip.sample_rate_hz, np.ascontiguousarray(data))
    except OSError as e:
        raise AudioFormatError(f"failed to write {path}: {e}", code="io")

    return path


def write_trajectory(trajectory: SourceTrajectory, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(trajectory.to_json_dict()), encoding="utf-8")
    return path


def read_trajectory(path: Path) -> SourceTrajectory:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise AudioFormatError(f"cannot read trajectory {path}: {e}", code="trajectory")
    return SourceTrajectory.from_json_dict(data)
