"""CLI subcommands; each module exposes `register(subparsers)`."""

from . import align, analyze, doa, evaluate, gen, report, separate, train, upmix

COMMANDS = (gen, train, evaluate, analyze, doa, align, upmix, separate, report)

__all__ = ["COMMANDS"]
