"""
Synthetic scene rendering: source signals, trajectories, binaural and FOA
renderers with exact ground truth.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import windows

from src.core.config import settings
from src.core.errors import SpatialLabError
from src.models.audio import AudioClip, AudioLayout, SourceTrajectory, grid_times, wrap_angle
from src.models.schemas import SceneParams, SourceKind, TrajectoryKind

logger = logging.getLogger(__name__)

PEAK_LEVEL = 0.5
BURST_RAMP_S = 0.010
CLICK_LEN = 32
AM_DEPTH = 0.5


class SceneError(SpatialLabError):
    """Scene cannot be rendered with the given inputs."""

    code = "scene"


# ---------------------------------------------------------------------------
# Source signals
# ---------------------------------------------------------------------------


def _peak_normalize(x: np.ndarray) -> np.ndarray:
    peak = np.max(np.abs(x)) if x.size else 0.0
    return x * (PEAK_LEVEL / peak) if peak > 0 else x


def _noise_bursts(rng: np.random.Generator, n: int, fs: int) -> np.ndarray:
    duty = rng.uniform(0.3, 0.7)
    ramp_len = int(round(BURST_RAMP_S * fs))
    envelope = np.zeros(n)
    pos = 0
    while pos < n:
        burst = int(rng.uniform(0.05, 0.3) * fs)
        ramp = 0.5 * (1 - np.cos(np.pi * np.arange(ramp_len) / ramp_len))
        shape = np.ones(burst)
        shape[:ramp_len] = ramp
        shape[-ramp_len:] = ramp[::-1]
        end = min(pos + burst, n)
        envelope[pos:end] = shape[: end - pos]
        pos += burst + int(burst * (1 - duty) / duty)
    return rng.standard_normal(n) * envelope


def _am_tone(rng: np.random.Generator, n: int, fs: int) -> np.ndarray:
    carrier_hz = rng.uniform(300.0, 3000.0)
    mod_hz = rng.uniform(2.0, 8.0)
    carrier_phase, mod_phase = rng.uniform(0.0, 2 * np.pi, size=2)
    t = np.arange(n) / fs
    envelope = 1.0 + AM_DEPTH * np.sin(2 * np.pi * mod_hz * t + mod_phase)
    return envelope * np.sin(2 * np.pi * carrier_hz * t + carrier_phase)


def click_onsets(rng: np.random.Generator, n: int, fs: int) -> np.ndarray:
    """Regular click onsets (samples) at 8-20 clicks/s from a random offset."""
    rate = rng.uniform(8.0, 20.0)
    period = fs / rate
    offset = rng.uniform(0.0, period)
    onsets = offset + period * np.arange(int(n / period) + 2)
    return onsets[onsets <= n - CLICK_LEN].astype(np.int64)


def _click_train(rng: np.random.Generator, n: int, fs: int) -> np.ndarray:
    out = np.zeros(n)
    window = windows.hann(CLICK_LEN, sym=True)
    for onset in click_onsets(rng, n, fs):
        out[onset : onset + CLICK_LEN] += window * rng.standard_normal(CLICK_LEN)
    return out


_SOURCES = {
    SourceKind.WHITE_NOISE_BURSTS: _noise_bursts,
    SourceKind.AM_TONE: _am_tone,
    SourceKind.CLICK_TRAIN: _click_train,
}


def sample_source_signal(
    rng: np.random.Generator,
    kind: SourceKind,
    duration_s: float,
    sample_rate_hz: int | None = None,
) -> np.ndarray:
    """
    Draw a mono source signal, peak-normalized to 0.5.

    Args:
        rng: Per-scene generator
        kind: Signal family; MIXED draws one of the other three
        duration_s: Length in seconds
        sample_rate_hz: Defaults to the configured rate
    """
    fs = sample_rate_hz or settings.sample_rate_hz
    n = int(round(duration_s * fs))
    if kind is SourceKind.MIXED:
        kind = list(_SOURCES)[int(rng.integers(len(_SOURCES)))]
    return _peak_normalize(_SOURCES[kind](rng, n, fs))


# ---------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------


def azimuth_bounds(params: SceneParams, layout: AudioLayout) -> tuple[float, float]:
    """Sampling range in radians: configured range or the layout's full range."""
    if params.azimuth_range_deg is not None:
        low, high = params.azimuth_range_deg
        return math.radians(low), math.radians(high)
    limit = layout.azimuth_limit_rad
    return -limit, limit


def linear_sweep(start_rad: float, end_rad: float, duration_s: float) -> SourceTrajectory:
    """Sweep on the trajectory grid; both endpoints are exact."""
    times = grid_times(duration_s)
    return SourceTrajectory(times, np.linspace(start_rad, end_rad, times.size))


def sample_trajectory(
    rng: np.random.Generator, params: SceneParams, layout: AudioLayout = AudioLayout.STEREO
) -> SourceTrajectory:
    """Draw a source trajectory on the trajectory grid covering the scene."""
    low, high = azimuth_bounds(params, layout)
    times = grid_times(params.duration_s)
    full_circle = layout is AudioLayout.FOA and params.azimuth_range_deg is None

    def draw() -> float:
        value = rng.uniform(low, high)
        return float(wrap_angle(value)) if full_circle else value

    if params.trajectory_kind is TrajectoryKind.STATIC:
        return SourceTrajectory(times, np.full(times.size, draw()))

    if params.trajectory_kind is TrajectoryKind.LINEAR_SWEEP:
        start, end = draw(), draw()
        return SourceTrajectory(times, np.linspace(start, end, times.size))

    max_step = math.radians(params.random_walk_max_step_deg)
    steps = np.clip(
        rng.normal(0.0, math.radians(params.random_walk_step_deg), size=times.size - 1),
        -max_step,
        max_step,
    )
    azimuth = np.empty(times.size)
    azimuth[0] = draw()
    for i, step in enumerate(steps, start=1):
        if full_circle:
            azimuth[i] = wrap_angle(azimuth[i - 1] + step)
        else:
            azimuth[i] = min(max(azimuth[i - 1] + step, low), high)
    return SourceTrajectory(times, azimuth)


# ---------------------------------------------------------------------------
# Renderers
# ---------------------------------------------------------------------------


def woodworth_itd_s(azimuth_rad: np.ndarray | float, params: SceneParams) -> np.ndarray:
    """Spherical-head ITD (r/c)(phi + sin phi); positive when the right ear leads."""
    phi = np.asarray(azimuth_rad, dtype=np.float64)
    return (params.head_radius_m / params.speed_of_sound_mps) * (phi + np.sin(phi))


def ild_gains(
    azimuth_rad: np.ndarray | float, params: SceneParams
) -> tuple[np.ndarray, np.ndarray]:
    """Frequency-independent (left, right) gains; right/left = ild_max*sin(phi) dB."""
    exponent = params.ild_max_db * np.sin(np.asarray(azimuth_rad, dtype=np.float64)) / 40.0
    return 10.0 ** (-exponent), 10.0 ** exponent


def _sample_azimuth(
    n: int, trajectory: SourceTrajectory, fs: int
) -> tuple[np.ndarray, np.ndarray]:
    if n == 0:
        return np.zeros(0), np.zeros(0)
    end_s = (n - 1) / fs
    if not trajectory.covers(0.0, end_s):
        raise SceneError(
            f"trajectory covers [{trajectory.times_s[0]:.3f}, {trajectory.duration_s:.3f}] s, "
            f"clip needs [0, {end_s:.3f}] s",
            code="coverage",
        )
    t = np.arange(n) / fs
    return trajectory.azimuth_at(t), trajectory.elevation_at(t)


def render_binaural(
    source: np.ndarray,
    trajectory: SourceTrajectory,
    params: SceneParams,
    rng: np.random.Generator | None = None,
    sample_rate_hz: int | None = None,
) -> AudioClip:
    """
    Render a mono source as a stereo scene.

    The right ear is read at n + tau*fs/2 and the left at n - tau*fs/2 through a
    linear-interpolation delay line, so the right ear leads for positive
    azimuth. Diffuse noise at params.snr_db is added when set.
    """
    fs = sample_rate_hz or settings.sample_rate_hz
    source = np.asarray(source, dtype=np.float64)
    azimuth, _ = _sample_azimuth(source.size, trajectory, fs)

    index = np.arange(source.size, dtype=np.float64)
    half_delay = (
        woodworth_itd_s(azimuth, params) * fs / 2.0 if params.itd_enabled else np.zeros_like(index)
    )
    gain_l, gain_r = ild_gains(azimuth, params)
    left = gain_l * np.interp(index - half_delay, index, source, left=0.0, right=0.0)
    right = gain_r * np.interp(index + half_delay, index, source, left=0.0, right=0.0)

    clip = AudioClip(np.stack([left, right]), fs, AudioLayout.STEREO)
    return add_diffuse_noise(clip, params.snr_db, rng)


def encode_foa(
    source: np.ndarray,
    trajectory: SourceTrajectory,
    params: SceneParams | None = None,
    rng: np.random.Generator | None = None,
    sample_rate_hz: int | None = None,
) -> AudioClip:
    """Plane-wave FOA encoding, ACN order (w, y, z, x) with SN3D scaling."""
    fs = sample_rate_hz or settings.sample_rate_hz
    source = np.asarray(source, dtype=np.float64)
    azimuth, elevation = _sample_azimuth(source.size, trajectory, fs)
    cos_el = np.cos(elevation)
    samples = np.stack(
        [
            source,
            source * np.sin(azimuth) * cos_el,
            source * np.sin(elevation),
            source * np.cos(azimuth) * cos_el,
        ]
    )
    clip = AudioClip(samples, fs, AudioLayout.FOA)
    return add_diffuse_noise(clip, params.snr_db if params else None, rng)


def add_diffuse_noise(
    clip: AudioClip, snr_db: float | None, rng: np.random.Generator | None
) -> AudioClip:
    """Independent white noise per channel at the given SNR; None leaves the clip clean."""
    if snr_db is None:
        return clip
    if rng is None:
        raise SceneError("noisy rendering needs an rng", code="rng")
    power = float(np.mean(clip.samples**2)) if clip.n_samples else 0.0
    if power == 0.0:
        return clip
    sigma = math.sqrt(power / 10.0 ** (snr_db / 10.0))
    noise = rng.normal(0.0, sigma, size=clip.samples.shape)
    return clip.with_samples(clip.samples + noise)


# ---------------------------------------------------------------------------
# Scenes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Scene:
    trajectory: SourceTrajectory
    audio: AudioClip
    source: np.ndarray
    gain_db: float


def render_scene(
    source: np.ndarray,
    trajectory: SourceTrajectory,
    params: SceneParams,
    layout: AudioLayout,
    rng: np.random.Generator | None = None,
) -> AudioClip:
    if layout is AudioLayout.STEREO:
        return render_binaural(source, trajectory, params, rng)
    if layout is AudioLayout.FOA:
        return encode_foa(source, trajectory, params, rng)
    raise SceneError(f"no renderer for {layout.value} scenes", code="layout")


def synthesize_scene(
    rng: np.random.Generator, params: SceneParams, layout: AudioLayout
) -> Scene:
    """
    Draw source, level and trajectory from rng, then render.
    The rendered audio is rounded to float32 so it round-trips through WAV exactly.
    """
    source = sample_source_signal(rng, params.source_kind, params.duration_s)
    gain_db = float(rng.uniform(*params.gain_db_range))
    source = source * 10.0 ** (gain_db / 20.0)
    trajectory = sample_trajectory(rng, params, layout)
    audio = render_scene(source, trajectory, params, layout, rng).as_float32()
    return Scene(trajectory, audio, source, gain_db)
