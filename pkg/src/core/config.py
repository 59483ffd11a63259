"""
Core configuration for the spatial-audio lab.
Fixed-rate DSP defaults shared by every module.
"""

from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import Literal


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="SPATIAL_LAB_",
        case_sensitive=False,
        extra="ignore",
    )

    # Application Settings
    environment: Literal["development", "production"] = "development"
    log_level: str = "INFO"
    output_dir: str = "runs"
    workers: int = 1

    # Audio
    sample_rate_hz: int = 16000
    trajectory_rate_hz: float = 6.0

    # Time-frequency analysis
    stft_window_len: int = 512
    stft_hop: int = 160
    n_mels: int = 64
    mel_f_min_hz: float = 0.0
    mel_f_max_hz: float = 8000.0
    gcc_max_lag: int = 16
    energy_floor: float = 1e-10

    # Frames quieter than this fraction of the clip's loudest frame count as silent
    active_frame_ratio: float = 1e-3


settings = Settings()
