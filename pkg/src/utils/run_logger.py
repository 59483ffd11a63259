"""
Run-scoped logging handler for collecting warnings beside command outputs.
"""

import logging
from pathlib import Path
from typing import List


class RunLogHandler(logging.Handler):
    """
    Logging handler that captures warnings emitted while a command runs.
    Lines are stored without timestamps so reruns write identical files.
    """

    def __init__(self) -> None:
        super().__init__()
        self.lines: List[str] = []
        self.setLevel(logging.WARNING)

    def emit(self, record: logging.LogRecord) -> None:
        """Add log record to the run buffer."""
        try:
            # Skip noisy third-party loggers
            if record.name.split(".")[0] in ["numba", "matplotlib", "asyncio"]:
                return

            if record.levelno < logging.WARNING:
                return

            self.lines.append(self.format(record))
        except Exception:
            self.handleError(record)

    def write(self, out_dir: Path) -> Path | None:
        """Write captured lines to warnings.log; nothing is written for a clean run."""
        if not self.lines:
            return None
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / "warnings.log"
        path.write_text("\n".join(self.lines) + "\n", encoding="utf-8")
        return path


def attach_run_logger() -> RunLogHandler:
    """Attach run log handler to root logger."""
    handler = RunLogHandler()
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))

    root_logger = logging.getLogger()
    root_logger.addHandler(handler)

    return handler


def detach_run_logger(handler: RunLogHandler) -> None:
    """Remove run log handler."""
    root_logger = logging.getLogger()
    root_logger.removeHandler(handler)
