"""
Audio and trajectory value objects.
Both are immutable after construction; arrays are copied and frozen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict

import numpy as np

from src.core.config import settings
from src.core.errors import SpatialLabError


class AudioError(SpatialLabError):
    """Invalid audio or trajectory container."""

    code = "audio"


class AudioLayout(str, Enum):
    """Channel layouts. FOA channels follow ACN order (w, y, z, x)."""

    MONO = "mono"
    STEREO = "stereo"
    FOA = "foa"

    @property
    def channels(self) -> int:
        return {"mono": 1, "stereo": 2, "foa": 4}[self.value]

    @property
    def channel_names(self) -> tuple[str, ...]:
        return {
            "mono": ("m",),
            "stereo": ("left", "right"),
            "foa": ("w", "y", "z", "x"),
        }[self.value]

    @property
    def azimuth_limit_rad(self) -> float:
        """Largest |azimuth| a scene in this layout may carry."""
        return math.pi / 2 if self is AudioLayout.STEREO else math.pi

    @classmethod
    def from_channels(cls, n_channels: int) -> "AudioLayout":
        for layout in cls:
            if layout.channels == n_channels:
                return layout
        raise AudioError(f"unsupported channel count: {n_channels}", code="channels")


def _frozen(values: Any, dtype: Any = np.float64) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


def wrap_angle(angle_rad: Any) -> Any:
    """Wrap angles to [-pi, pi)."""
    return (np.asarray(angle_rad) + math.pi) % (2 * math.pi) - math.pi


@dataclass(frozen=True)
class AudioClip:
    """
    Multi-channel sample buffer, samples shaped [channels x n].

    Nominal full scale is [-1, 1] but it is not enforced here: mixtures may
    exceed it. Out-of-range samples are clamped and reported only when written
    as PCM16; float32 files store them unchanged.
    """

    samples: np.ndarray
    sample_rate_hz: int = 16000
    layout: AudioLayout = AudioLayout.MONO

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim == 1:
            samples = samples[np.newaxis, :]
        if samples.ndim != 2:
            raise AudioError(f"samples must be 2-D [channels x n], got shape {samples.shape}")
        if samples.shape[0] != self.layout.channels:
            raise AudioError(
                f"{self.layout.value} layout needs {self.layout.channels} channels, "
                f"got {samples.shape[0]}",
                code="channels",
            )
        if self.sample_rate_hz <= 0:
            raise AudioError(f"sample rate must be positive, got {self.sample_rate_hz}")
        if not np.all(np.isfinite(samples)):
            raise AudioError("samples contain non-finite values")
        object.__setattr__(self, "samples", _frozen(samples))

    @property
    def n_samples(self) -> int:
        return int(self.samples.shape[1])

    @property
    def n_channels(self) -> int:
        return int(self.samples.shape[0])

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.sample_rate_hz

    @property
    def peak(self) -> float:
        return float(np.max(np.abs(self.samples))) if self.n_samples else 0.0

    @property
    def float32_exact(self) -> bool:
        """True when every sample survives a float32 WAV unchanged."""
        return bool(np.array_equal(self.samples.astype(np.float32), self.samples))

    def as_float32(self) -> "AudioClip":
        """Round samples to the nearest float32 values."""
        if self.float32_exact:
            return self
        return self.with_samples(self.samples.astype(np.float32).astype(np.float64))

    def channel(self, name: str) -> np.ndarray:
        """Return one channel by its layout name (e.g. 'left', 'w')."""
        try:
            index = self.layout.channel_names.index(name)
        except ValueError:
            raise AudioError(f"{self.layout.value} layout has no channel '{name}'")
        return self.samples[index]

    def with_samples(self, samples: np.ndarray, layout: AudioLayout | None = None) -> "AudioClip":
        """New clip at the same rate, optionally in another layout."""
        return AudioClip(samples, self.sample_rate_hz, layout or self.layout)

    def equals(self, other: "AudioClip") -> bool:
        return (
            self.layout is other.layout
            and self.sample_rate_hz == other.sample_rate_hz
            and self.samples.shape == other.samples.shape
            and bool(np.array_equal(self.samples, other.samples))
        )


@dataclass(frozen=True)
class SourceTrajectory:
    """Time-stamped source direction track on the trajectory grid."""

    times_s: np.ndarray
    azimuth_rad: np.ndarray
    elevation_rad: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self) -> None:
        times = np.asarray(self.times_s, dtype=np.float64).ravel()
        azimuth = np.asarray(self.azimuth_rad, dtype=np.float64).ravel()
        elevation = np.asarray(self.elevation_rad, dtype=np.float64).ravel()
        if elevation.size == 0:
            elevation = np.zeros_like(azimuth)

        if not (times.size == azimuth.size == elevation.size):
            raise AudioError(
                f"trajectory arrays differ in length: {times.size}/{azimuth.size}/{elevation.size}"
            )
        if times.size == 0:
            raise AudioError("trajectory is empty")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(azimuth))):
            raise AudioError("trajectory contains non-finite values")
        if np.any(np.diff(times) <= 0):
            raise AudioError("trajectory times must be strictly ascending")
        if np.any(np.abs(azimuth) > math.pi + 1e-12):
            raise AudioError("trajectory azimuth outside [-pi, pi]")

        object.__setattr__(self, "times_s", _frozen(times))
        object.__setattr__(self, "azimuth_rad", _frozen(azimuth))
        object.__setattr__(self, "elevation_rad", _frozen(elevation))

    @classmethod
    def constant(
        cls,
        azimuth_rad: float,
        duration_s: float,
        rate_hz: float | None = None,
    ) -> "SourceTrajectory":
        """Static source on the trajectory grid covering [0, duration_s]."""
        times = grid_times(duration_s, rate_hz)
        return cls(times, np.full(times.size, float(azimuth_rad)), np.zeros(times.size))

    @property
    def duration_s(self) -> float:
        return float(self.times_s[-1])

    def check_range(self, layout: AudioLayout) -> None:
        """Raise when the track leaves the azimuth range of the given layout."""
        limit = layout.azimuth_limit_rad
        if np.any(np.abs(self.azimuth_rad) > limit + 1e-12):
            raise AudioError(
                f"azimuth outside the {layout.value} range [-{limit:.4f}, {limit:.4f}] rad",
                code="azimuth_range",
            )

    def covers(self, start_s: float, end_s: float) -> bool:
        return bool(self.times_s[0] <= start_s + 1e-9 and self.times_s[-1] >= end_s - 1e-9)

    def azimuth_at(self, times_s: np.ndarray) -> np.ndarray:
        """Linear interpolation through the unwrapped track, wrapped to [-pi, pi)."""
        unwrapped = np.unwrap(self.azimuth_rad)
        values = np.interp(np.asarray(times_s, dtype=np.float64), self.times_s, unwrapped)
        if np.all(np.abs(self.azimuth_rad) <= math.pi / 2):
            # Frontal tracks never wrap; keep +pi/2 instead of folding it
            return values
        return wrap_angle(values)

    def elevation_at(self, times_s: np.ndarray) -> np.ndarray:
        return np.interp(np.asarray(times_s, dtype=np.float64), self.times_s, self.elevation_rad)

    def with_azimuth(self, azimuth_rad: np.ndarray) -> "SourceTrajectory":
        return SourceTrajectory(self.times_s, azimuth_rad, self.elevation_rad)

    def equals(self, other: "SourceTrajectory", atol: float = 0.0) -> bool:
        return (
            self.times_s.shape == other.times_s.shape
            and bool(np.allclose(self.times_s, other.times_s, rtol=0, atol=atol))
            and bool(np.allclose(self.azimuth_rad, other.azimuth_rad, rtol=0, atol=atol))
            and bool(np.allclose(self.elevation_rad, other.elevation_rad, rtol=0, atol=atol))
        )

    def to_json_dict(self) -> Dict[str, list]:
        return {
            "times_s": self.times_s.tolist(),
            "azimuth_rad": self.azimuth_rad.tolist(),
            "elevation_rad": self.elevation_rad.tolist(),
        }

    @classmethod
    def from_json_dict(cls, data: Dict[str, Any]) -> "SourceTrajectory":
        try:
            return cls(data["times_s"], data["azimuth_rad"], data.get("elevation_rad", []))
        except KeyError as e:
            raise AudioError(f"trajectory JSON missing field {e}")


def grid_times(duration_s: float, rate_hz: float | None = None) -> np.ndarray:
    """Trajectory grid 0, 1/rate, ... reaching at least duration_s."""
    rate = rate_hz or settings.trajectory_rate_hz
    n_points = int(math.ceil(duration_s * rate - 1e-9)) + 1
    return np.arange(n_points, dtype=np.float64) / rate
