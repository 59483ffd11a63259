"""Core module initialization."""

from .config import settings
from .errors import SpatialLabError, ConfigError

__all__ = ["settings", "SpatialLabError", "ConfigError"]
