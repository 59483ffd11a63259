"""Utils module initialization."""

from .logging_config import setup_logging
from .run_logger import RunLogHandler, attach_run_logger, detach_run_logger

__all__ = ["setup_logging", "RunLogHandler", "attach_run_logger", "detach_run_logger"]
