"""
Embedding analysis: PCA, least-squares projection onto azimuth and
per-frame azimuth-bin tracks.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from src.dsp.cues import stereo_cues
from src.dsp.stft import StftParams
from src.metrics.statistics import PairedSeries, pearson, spearman
from src.models.audio import AudioClip, AudioLayout, SourceTrajectory
from src.models.schemas import AnalysisResult, CorrelationRecord
from .features import FeatureError
from .network import AlignmentModel

logger = logging.getLogger(__name__)

VARIANCE_FLOOR = 1e-12


@dataclass(frozen=True)
class PcaResult:
    """Components [k x h] (orthonormal rows), projections [n x k], variances descending."""

    mean: np.ndarray
    components: np.ndarray
    projections: np.ndarray
    explained_variance: np.ndarray
    explained_variance_ratio: np.ndarray
    degenerate: bool = False


def pca(embeddings: np.ndarray, k: int | None = None) -> PcaResult:
    """
    Eigendecomposition of the mean-centred covariance.

    Each component's largest-magnitude coordinate is made positive so signs are
    reproducible. Zero total variance sets `degenerate` and zero ratios.

    Raises:
        FeatureError: n <= h or non-finite input
    """
    x = np.asarray(embeddings, dtype=np.float64)
    if x.ndim != 2:
        raise FeatureError(f"PCA expects [n x h] embeddings, got shape {x.shape}")
    n, h = x.shape
    if n <= h:
        raise FeatureError(f"PCA needs more samples than dimensions (n={n}, h={h})", code="pca")
    if not np.all(np.isfinite(x)):
        raise FeatureError("embeddings contain non-finite values", code="pca")
    k = h if k is None else min(k, h)

    mean = x.mean(axis=0)
    centred = x - mean
    covariance = centred.T @ centred / (n - 1)
    eigenvalues, eigenvectors = np.linalg.eigh(covariance)
    order = np.argsort(eigenvalues)[::-1][:k]
    eigenvalues = np.clip(eigenvalues[order], 0.0, None)
    components = eigenvectors[:, order].T

    pivots = np.argmax(np.abs(components), axis=1)
    signs = np.sign(components[np.arange(k), pivots])
    components = components * np.where(signs == 0, 1.0, signs)[:, None]

    total = float(np.clip(np.linalg.eigvalsh(covariance), 0.0, None).sum())
    degenerate = total <= VARIANCE_FLOOR
    ratio = np.zeros(k) if degenerate else eigenvalues / total
    if degenerate:
        logger.warning("⚠️  Embeddings have zero variance; PCA is degenerate")
    return PcaResult(mean, components, centred @ components.T, eigenvalues, ratio, degenerate)


def _record(x: np.ndarray, y: np.ndarray) -> CorrelationRecord:
    if x.size < 3:
        return CorrelationRecord(defined=False)
    series = PairedSeries(x, y)
    r, rho = pearson(series), spearman(series)
    return CorrelationRecord(pearson=r.value, spearman=rho.value, defined=r.defined and rho.defined)


def cca_correlation(
    embeddings: np.ndarray, target: np.ndarray
) -> Tuple[np.ndarray, CorrelationRecord]:
    """
    Canonical correlation with a single target: the least-squares projection
    of the centred embeddings onto the target, and its correlation with it.
    """
    x = np.asarray(embeddings, dtype=np.float64)
    y = np.asarray(target, dtype=np.float64).ravel()
    if x.shape[0] != y.size:
        raise FeatureError(f"{x.shape[0]} embeddings but {y.size} targets")
    centred = x - x.mean(axis=0)
    beta, *_ = np.linalg.lstsq(centred, y - y.mean(), rcond=None)
    projection = centred @ beta
    return projection, _record(projection, y)


def bin_track(
    projections: np.ndarray,
    layout: AudioLayout,
    n_bins: int = 12,
    value_range: Tuple[float, float] | None = None,
) -> np.ndarray:
    """
    Discretise principal-component projections into position bins.

    Stereo: the first component is split into n_bins equal-width horizontal
    bins over value_range (the projections' own range by default).
    FOA: the angle atan2(pc2, pc1) is split into n_bins azimuth sectors.
    """
    p = np.asarray(projections, dtype=np.float64)
    if p.ndim == 1:
        p = p[:, None]
    if layout is AudioLayout.FOA:
        if p.shape[1] < 2:
            raise FeatureError("FOA bin tracks need two principal components")
        angle = np.arctan2(p[:, 1], p[:, 0])
        sector = ((angle + math.pi) / (2 * math.pi) * n_bins).astype(np.int64)
        return np.minimum(sector, n_bins - 1)

    if value_range is None:
        value_range = (float(p[:, 0].min()), float(p[:, 0].max()))
    low, high = value_range
    if high <= low:
        return np.zeros(p.shape[0], dtype=np.int64)
    edges = np.linspace(low, high, n_bins + 1)[1:-1]
    return np.digitize(p[:, 0], edges).astype(np.int64)


def _azimuth_target(azimuth_rad: np.ndarray, layout: AudioLayout) -> np.ndarray:
    """Stereo azimuth is monotone on [-pi/2, pi/2]; FOA uses its lateral sine."""
    return np.sin(azimuth_rad) if layout is AudioLayout.FOA else azimuth_rad


def analyze_embeddings(
    model: AlignmentModel,
    clips: Sequence[Tuple[str, AudioClip, SourceTrajectory]],
    n_bins: int = 12,
    params: StftParams | None = None,
) -> Tuple[AnalysisResult, List[Dict[str, Any]]]:
    """
    PCA of active-frame audio embeddings and their correlation with the true azimuth.

    Args:
        model: Trained alignment model
        clips: (id, aligned audio, ground-truth trajectory) triples
        n_bins: Bins for the per-frame track

    Returns:
        (AnalysisResult, track rows with id, frame, time_s, azimuth_deg, pc1, bin)
    """
    params = params or StftParams()
    values, azimuths, leds, frame_keys = [], [], [], []
    for clip_id, clip, trajectory in clips:
        embedding = model.audio_embedding(clip, params)
        active = embedding.active
        frame_times = embedding.frame_times_s
        values.append(embedding.values[active])
        azimuths.append(trajectory.azimuth_at(frame_times[active]))
        frame_keys.extend(
            (clip_id, int(i), float(frame_times[i])) for i in np.flatnonzero(active)
        )
        if clip.layout is AudioLayout.STEREO:
            leds.append(stereo_cues(clip, params).led[active])

    if not values:
        raise FeatureError("no clips to analyze")
    embeddings = np.concatenate(values)
    azimuth = np.concatenate(azimuths)
    result = pca(embeddings)
    target = _azimuth_target(azimuth, model.layout)

    if result.degenerate:
        pc1 = CorrelationRecord(defined=False)
        cca = CorrelationRecord(defined=False)
    else:
        pc1 = _record(result.projections[:, 0], target)
        _, cca = cca_correlation(embeddings, target)
    led_record = _record(np.concatenate(leds), target) if leds else None

    bins = bin_track(result.projections[:, :2], model.layout, n_bins)
    rows = [
        {
            "id": clip_id,
            "frame": frame,
            "time_s": time_s,
            "azimuth_deg": math.degrees(float(azimuth[i])),
            "pc1": float(result.projections[i, 0]),
            "bin": int(bins[i]),
        }
        for i, (clip_id, frame, time_s) in enumerate(frame_keys)
    ]

    analysis = AnalysisResult(
        n_frames=int(embeddings.shape[0]),
        explained_variance_ratio=result.explained_variance_ratio.tolist(),
        degenerate=result.degenerate,
        pc1_vs_azimuth=pc1,
        cca_vs_azimuth=cca,
        led_vs_azimuth=led_record,
    )
    logger.info(
        f"Analyzed {analysis.n_frames} frames: PC1 spearman={pc1.spearman}, "
        f"CCA spearman={cca.spearman}"
    )
    return analysis, rows
