"""
Logging configuration.
"""

import logging
import sys
from src.core.config import settings


def setup_logging() -> None:
    """Configure application logging."""
    formatter = logging.Formatter(
        fmt="%(asctime)s - %(name)s - %(levelname)s - %(message)s", datefmt="%Y-%m-%d %H:%M:%S"
    )

    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, settings.log_level.upper()))

    # Repeated CLI invocations in one process must not stack handlers
    if not any(getattr(h, "_spatial_lab_console", False) for h in root_logger.handlers):
        console_handler = logging.StreamHandler(sys.stdout)
        console_handler.setFormatter(formatter)
        console_handler._spatial_lab_console = True  # type: ignore[attr-defined]
        root_logger.addHandler(console_handler)

    logging.getLogger("numba").setLevel(logging.WARNING)
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
