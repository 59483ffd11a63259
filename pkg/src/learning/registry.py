"""
Registry of audio feature extractors.
New front ends register here instead of being wired into the trainer.
"""

import logging
from typing import Dict, Protocol

from pydantic import BaseModel

from src.dsp.stft import StftParams
from src.models.audio import AudioClip, AudioLayout
from src.models.schemas import FeatureMode

logger = logging.getLogger(__name__)


class ExtractorMetadata(BaseModel):
    """Metadata for a feature extractor."""

    name: str
    mode: FeatureMode
    description: str
    layouts: list[AudioLayout]


class FeatureExtractor(Protocol):
    """Interface every audio front end implements."""

    def extract(self, clip: AudioClip, params: StftParams) -> "AudioFeatures":  # noqa: F821
        """
        Compute per-frame audio features.

        Args:
            clip: Stereo or FOA clip
            params: STFT framing shared with the trajectory grid

        Returns:
            AudioFeatures with frame times, [frames x dim] values and frame energy
        """
        ...

    def dim(self, layout: AudioLayout) -> int:
        """Feature dimension for a layout."""
        ...

    def get_metadata(self) -> ExtractorMetadata:
        ...


class FeatureRegistry:
    """Central registry for audio feature extractors, keyed by feature mode."""

    _extractors: Dict[FeatureMode, FeatureExtractor] = {}

    @classmethod
    def register(cls, mode: FeatureMode, extractor: FeatureExtractor) -> None:
        cls._extractors[mode] = extractor

    @classmethod
    def get(cls, mode: FeatureMode | str) -> FeatureExtractor:
        """Get the extractor for a feature mode."""
        if len(cls._extractors) == 0:
            _register_extractors()

        from .features import FeatureError

        try:
            mode = FeatureMode(mode)
        except ValueError:
            raise FeatureError(f"Unknown feature mode: {mode}", code="feature_mode")
        if mode not in cls._extractors:
            raise FeatureError(f"No extractor registered for {mode.value}", code="feature_mode")
        return cls._extractors[mode]

    @classmethod
    def list_available(cls) -> list[ExtractorMetadata]:
        if len(cls._extractors) == 0:
            _register_extractors()
        return [ext.get_metadata() for ext in cls._extractors.values()]


def _register_extractors() -> None:
    """Lazy load and register the built-in extractors."""
    if len(FeatureRegistry._extractors) > 0:
        return

    from .extractors import CueExtractor, CueGccExtractor, MelExtractor

    FeatureRegistry.register(FeatureMode.CUES, CueExtractor())
    FeatureRegistry.register(FeatureMode.CUES_GCC, CueGccExtractor())
    FeatureRegistry.register(FeatureMode.MEL, MelExtractor())
    logger.debug(f"Registered {len(FeatureRegistry._extractors)} feature extractors")
