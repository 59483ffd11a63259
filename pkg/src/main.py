"""
spatial-lab command-line entry point.
Self-supervised spatial alignment of audio and source trajectories.
"""

import argparse
import json
import logging
import sys
from typing import NoReturn, Sequence

from src import __version__
from src.commands import COMMANDS
from src.core.config import settings
from src.core.errors import ConfigError, SpatialLabError
from src.utils.logging_config import setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_EXPECTED = 2


class CliArgumentParser(argparse.ArgumentParser):
    """Reports usage errors in the same JSON shape as failed commands."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        _emit_error(ConfigError(message, code="usage").to_dict())
        raise SystemExit(EXIT_EXPECTED)


def build_parser() -> argparse.ArgumentParser:
    parser = CliArgumentParser(
        prog="spatial-lab",
        description="Synthetic spatial-audio alignment: generate, train, analyze, evaluate.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def _emit_error(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, run one subcommand and map failures to exit codes."""
    setup_logging()
    args = build_parser().parse_args(argv)
    logger.debug(f"Running '{args.command}' (environment: {settings.environment})")

    try:
        return args.handler(args)
    except SpatialLabError as exc:
        logger.error(f"❌ {args.command} failed: {exc}")
        _emit_error(exc.to_dict())
        return EXIT_EXPECTED
    except Exception as exc:
        logger.error(f"Unhandled exception: {type(exc).__name__}", exc_info=True)
        payload = {"error": "Internal error", "code": "internal", "type": type(exc).__name__}
        if settings.environment == "development":
            payload["detail"] = str(exc)
        _emit_error(payload)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
