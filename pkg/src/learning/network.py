"""
Two-branch alignment network: per-frame audio and trajectory branches, a
fusion layer, masked mean pooling and a sigmoid head. Gradients are exact
backpropagation in numpy.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List

import numpy as np
from pydantic import ValidationError
from scipy.special import expit

from src.core.errors import SpatialLabError
from src.dsp.stft import StftParams
from src.models.audio import AudioClip, AudioLayout
from src.models.schemas import CHECKPOINT_VERSION, FeatureMode, ModelCheckpoint, TrainHyper
from src.services.artifacts import ArtifactError, read_json, write_json
from .features import FeatureDataset, NormStats, ablate_channels, active_frames
from .registry import FeatureRegistry

logger = logging.getLogger(__name__)

PROB_CLAMP = 1e-7

PARAM_NAMES = ("w_audio", "b_audio", "w_traj", "b_traj", "w_fuse", "b_fuse", "w_out", "b_out")
WEIGHT_NAMES = ("w_audio", "w_traj", "w_fuse", "w_out")

Params = Dict[str, np.ndarray]


class CheckpointError(SpatialLabError):
    """Checkpoint missing, unreadable or inconsistent."""

    code = "checkpoint"


def bce_loss(p: np.ndarray | float, y: np.ndarray | float) -> np.ndarray | float:
    """Binary cross-entropy in nats with probabilities clamped to [1e-7, 1-1e-7]."""
    p_arr = np.clip(np.asarray(p, dtype=np.float64), PROB_CLAMP, 1.0 - PROB_CLAMP)
    y_arr = np.asarray(y, dtype=np.float64)
    loss = -(y_arr * np.log(p_arr) + (1.0 - y_arr) * np.log(1.0 - p_arr))
    return float(loss) if loss.ndim == 0 else loss


@dataclass
class ForwardCache:
    audio: np.ndarray
    traj: np.ndarray
    weights: np.ndarray
    h_audio: np.ndarray
    h_traj: np.ndarray
    fused_in: np.ndarray
    h_fuse: np.ndarray
    pooled: np.ndarray
    logits: np.ndarray
    probs: np.ndarray


class AlignmentNetwork:
    """f(v, a) -> P(aligned). Inputs are normalized [B x T x d] arrays plus a frame mask."""

    def __init__(self, params: Params):
        missing = [name for name in PARAM_NAMES if name not in params]
        if missing:
            raise CheckpointError(f"network parameters missing: {missing}")
        self.params = {name: np.asarray(params[name], dtype=np.float64) for name in PARAM_NAMES}
        self._check_shapes()

    @classmethod
    def initialize(
        cls, audio_dim: int, traj_dim: int, hidden: int, rng: np.random.Generator
    ) -> "AlignmentNetwork":
        """Weights ~ N(0, 1/fan_in), fusion biases ~ N(0, 1), other biases zero."""
        if hidden < 2:
            raise CheckpointError(f"hidden width must be at least 2, got {hidden}")

        def weight(fan_in: int, *shape: int) -> np.ndarray:
            return rng.normal(0.0, 1.0 / np.sqrt(fan_in), size=shape)

        return cls(
            {
                "w_audio": weight(audio_dim, audio_dim, hidden),
                "b_audio": np.zeros(hidden),
                "w_traj": weight(traj_dim, traj_dim, hidden),
                "b_traj": np.zeros(hidden),
                "w_fuse": weight(2 * hidden, 2 * hidden, hidden),
                "b_fuse": rng.normal(0.0, 1.0, size=hidden),
                "w_out": weight(hidden, hidden),
                "b_out": np.zeros(1),
            }
        )

    def _check_shapes(self) -> None:
        p = self.params
        audio_dim, hidden = p["w_audio"].shape if p["w_audio"].ndim == 2 else (0, 0)
        traj_dim = p["w_traj"].shape[0] if p["w_traj"].ndim == 2 else 0
        expected = {
            "w_audio": (audio_dim, hidden),
            "b_audio": (hidden,),
            "w_traj": (traj_dim, hidden),
            "b_traj": (hidden,),
            "w_fuse": (2 * hidden, hidden),
            "b_fuse": (hidden,),
            "w_out": (hidden,),
            "b_out": (1,),
        }
        for name, shape in expected.items():
            if p[name].shape != shape:
                raise CheckpointError(
                    f"parameter {name} has shape {p[name].shape}, expected {shape}"
                )
        if hidden < 2:
            raise CheckpointError(f"hidden width must be at least 2, got {hidden}")
        if not all(np.all(np.isfinite(v)) for v in p.values()):
            raise CheckpointError("network parameters contain non-finite values")

    @property
    def hidden(self) -> int:
        return int(self.params["w_audio"].shape[1])

    @property
    def audio_dim(self) -> int:
        return int(self.params["w_audio"].shape[0])

    @property
    def traj_dim(self) -> int:
        return int(self.params["w_traj"].shape[0])

    def copy(self) -> "AlignmentNetwork":
        return AlignmentNetwork({k: v.copy() for k, v in self.params.items()})

    def audio_branch(self, audio: np.ndarray) -> np.ndarray:
        return np.tanh(audio @ self.params["w_audio"] + self.params["b_audio"])

    def forward(self, audio: np.ndarray, traj: np.ndarray, mask: np.ndarray) -> ForwardCache:
        p = self.params
        counts = np.maximum(mask.sum(axis=1, keepdims=True), 1)
        weights = mask / counts

        h_audio = self.audio_branch(audio)
        h_traj = np.tanh(traj @ p["w_traj"] + p["b_traj"])
        fused_in = np.concatenate([h_audio, h_traj], axis=-1)
        h_fuse = np.tanh(fused_in @ p["w_fuse"] + p["b_fuse"])
        pooled = np.einsum("bt,bth->bh", weights, h_fuse)
        logits = pooled @ p["w_out"] + p["b_out"][0]
        return ForwardCache(
            audio, traj, weights, h_audio, h_traj, fused_in, h_fuse, pooled, logits, expit(logits)
        )

    def logits(self, audio: np.ndarray, traj: np.ndarray, mask: np.ndarray) -> np.ndarray:
        return self.forward(audio, traj, mask).logits

    def predict_proba(self, audio: np.ndarray, traj: np.ndarray, mask: np.ndarray) -> np.ndarray:
        return self.forward(audio, traj, mask).probs

    def penalty(self, weight_decay: float) -> float:
        if weight_decay == 0:
            return 0.0
        return 0.5 * weight_decay * sum(float(np.sum(self.params[n] ** 2)) for n in WEIGHT_NAMES)

    def loss(
        self,
        audio: np.ndarray,
        traj: np.ndarray,
        mask: np.ndarray,
        y: np.ndarray,
        weight_decay: float = 0.0,
    ) -> float:
        """Mean cross-entropy over the batch plus the L2 penalty on weight matrices."""
        probs = self.forward(audio, traj, mask).probs
        return float(np.mean(bce_loss(probs, y))) + self.penalty(weight_decay)

    def loss_and_grad(
        self,
        audio: np.ndarray,
        traj: np.ndarray,
        mask: np.ndarray,
        y: np.ndarray,
        weight_decay: float = 0.0,
    ) -> tuple[float, Params]:
        """Loss and exact gradients for every parameter tensor."""
        p = self.params
        cache = self.forward(audio, traj, mask)
        batch = y.shape[0]
        loss = float(np.mean(bce_loss(cache.probs, y))) + self.penalty(weight_decay)

        inside = (cache.probs > PROB_CLAMP) & (cache.probs < 1.0 - PROB_CLAMP)
        d_logits = np.where(inside, cache.probs - y, 0.0) / batch

        grads: Params = {
            "w_out": cache.pooled.T @ d_logits,
            "b_out": np.array([d_logits.sum()]),
        }
        d_pooled = np.outer(d_logits, p["w_out"])
        d_fuse = cache.weights[..., None] * d_pooled[:, None, :] * (1.0 - cache.h_fuse**2)
        grads["w_fuse"] = np.einsum("btc,bth->ch", cache.fused_in, d_fuse)
        grads["b_fuse"] = d_fuse.sum(axis=(0, 1))

        d_fused_in = d_fuse @ p["w_fuse"].T
        hidden = self.hidden
        d_audio = d_fused_in[..., :hidden] * (1.0 - cache.h_audio**2)
        d_traj = d_fused_in[..., hidden:] * (1.0 - cache.h_traj**2)
        grads["w_audio"] = np.einsum("bti,bth->ih", cache.audio, d_audio)
        grads["b_audio"] = d_audio.sum(axis=(0, 1))
        grads["w_traj"] = np.einsum("bti,bth->ih", cache.traj, d_traj)
        grads["b_traj"] = d_traj.sum(axis=(0, 1))

        if weight_decay:
            for name in WEIGHT_NAMES:
                grads[name] = grads[name] + weight_decay * p[name]
        return loss, grads

    def scrambled(self, rng: np.random.Generator) -> "AlignmentNetwork":
        """Same parameter values, each tensor independently permuted."""
        return AlignmentNetwork(
            {k: rng.permutation(v.ravel()).reshape(v.shape) for k, v in self.params.items()}
        )

    def to_lists(self) -> Dict[str, List]:
        return {name: self.params[name].tolist() for name in PARAM_NAMES}


@dataclass(frozen=True)
class AudioEmbedding:
    """Audio-branch activations [frames x hidden] with the frame grid and activity mask."""

    values: np.ndarray
    frame_times_s: np.ndarray
    active: np.ndarray

    def pooled(self) -> np.ndarray:
        """Mean over active frames; all frames when none is active."""
        frames = self.values[self.active] if np.any(self.active) else self.values
        return frames.mean(axis=0)


@dataclass
class AlignmentModel:
    """Network plus the normalization and feature configuration it was trained with."""

    network: AlignmentNetwork
    norm: NormStats
    layout: AudioLayout
    feature_mode: FeatureMode
    hyper: TrainHyper
    trained: bool = True

    def _inputs(self, dataset: FeatureDataset) -> tuple[np.ndarray, np.ndarray]:
        if dataset.audio_dim != self.network.audio_dim:
            raise CheckpointError(
                f"features have {dataset.audio_dim} audio dims, model expects "
                f"{self.network.audio_dim}",
                code="dimension",
            )
        return self.norm.apply_audio(dataset.audio), self.norm.apply_traj(dataset.traj)

    def predict_proba(self, dataset: FeatureDataset) -> np.ndarray:
        audio, traj = self._inputs(dataset)
        return self.network.predict_proba(audio, traj, dataset.mask)

    def logits(self, dataset: FeatureDataset) -> np.ndarray:
        audio, traj = self._inputs(dataset)
        return self.network.logits(audio, traj, dataset.mask)

    def audio_embedding(self, clip: AudioClip, params: StftParams | None = None) -> AudioEmbedding:
        """Audio-branch activations only; the trajectory is not consulted."""
        if clip.layout is not self.layout:
            raise CheckpointError(
                f"model expects {self.layout.value} audio, got {clip.layout.value}", code="layout"
            )
        extracted = FeatureRegistry.get(self.feature_mode).extract(
            ablate_channels(clip, self.hyper.ablate_channels), params or StftParams()
        )
        values = self.network.audio_branch(self.norm.apply_audio(extracted.values))
        return AudioEmbedding(values, extracted.frame_times_s, active_frames(extracted.energy))

    def with_network(
        self, network: AlignmentNetwork, trained: bool | None = None
    ) -> "AlignmentModel":
        return AlignmentModel(
            network,
            self.norm,
            self.layout,
            self.feature_mode,
            self.hyper,
            self.trained if trained is None else trained,
        )

    def to_checkpoint(self) -> ModelCheckpoint:
        return ModelCheckpoint(
            layout=self.layout,
            feature_mode=self.feature_mode,
            audio_dim=self.network.audio_dim,
            traj_dim=self.network.traj_dim,
            hidden=self.network.hidden,
            params=self.network.to_lists(),
            norm_stats=self.norm.to_record(),
            hyper=self.hyper,
            seed=self.hyper.seed,
            trained=self.trained,
        )

    @classmethod
    def from_checkpoint(cls, checkpoint: ModelCheckpoint) -> "AlignmentModel":
        if checkpoint.format_version != CHECKPOINT_VERSION:
            raise CheckpointError(
                f"checkpoint format {checkpoint.format_version} is not supported "
                f"(expected {CHECKPOINT_VERSION})",
                code="version",
            )
        network = AlignmentNetwork({k: np.asarray(v) for k, v in checkpoint.params.items()})
        if (network.audio_dim, network.traj_dim, network.hidden) != (
            checkpoint.audio_dim,
            checkpoint.traj_dim,
            checkpoint.hidden,
        ):
            raise CheckpointError("checkpoint dimensions disagree with its parameters")
        norm = NormStats.from_record(checkpoint.norm_stats)
        if norm.audio_mean.shape != (network.audio_dim,) or norm.traj_mean.shape != (
            network.traj_dim,
        ):
            raise CheckpointError("normalization stats disagree with the network dimensions")
        return cls(
            network,
            norm,
            checkpoint.layout,
            checkpoint.feature_mode,
            checkpoint.hyper,
            checkpoint.trained,
        )

    def save(self, path: Path) -> Path:
        path = write_json(self.to_checkpoint(), path)
        logger.info(f"✅ Saved {self.layout.value} checkpoint to {path}")
        return path

    @classmethod
    def load(cls, path: Path) -> "AlignmentModel":
        try:
            raw = read_json(path)
        except ArtifactError as e:
            raise CheckpointError(f"cannot read checkpoint: {e}", code=e.code)
        try:
            checkpoint = ModelCheckpoint.model_validate(raw)
        except ValidationError as e:
            raise CheckpointError(f"checkpoint schema error: {e.errors()[0]['msg']}", code="schema")
        return cls.from_checkpoint(checkpoint)


def extract_audio_embedding(model: AlignmentModel, clip: AudioClip) -> np.ndarray:
    """Per-frame audio-branch embedding [frames x hidden], values in (-1, 1)."""
    return model.audio_embedding(clip).values
