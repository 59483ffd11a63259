"""
`gen`: render a synthetic pretext dataset (WAV + trajectory JSON + manifest).
"""

import argparse
import logging

from src.models.schemas import GenerationConfig, SourceKind, TaskMode, TrajectoryKind
from src.scenes.generator import MANIFEST_FILE, generate_dataset
from src.services.artifacts import write_json
from .common import add_common_arguments, command_run, output_dir, resolve_params

logger = logging.getLogger(__name__)

COMMAND = "gen"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(COMMAND, help="Generate a synthetic scene dataset")
    add_common_arguments(parser)
    parser.add_argument("--n", type=int, help="Number of scenes")
    parser.add_argument("--mode", choices=[m.value for m in TaskMode], help="Pretext task")
    parser.add_argument("--seed", type=int, help="Master seed")
    parser.add_argument("--snr-db", help="Diffuse-noise SNR in dB, or 'inf' for clean")
    parser.add_argument("--duration-s", type=float, help="Scene duration")
    parser.add_argument("--source-kind", choices=[k.value for k in SourceKind])
    parser.add_argument("--trajectory-kind", choices=[k.value for k in TrajectoryKind])
    parser.add_argument("--workers", type=int, help="Parallel scene renderers")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    config = resolve_params(
        GenerationConfig,
        args.config,
        COMMAND,
        {
            "n": args.n,
            "mode": args.mode,
            "master_seed": args.seed,
            "scene": {
                "snr_db": args.snr_db,
                "duration_s": args.duration_s,
                "source_kind": args.source_kind,
                "trajectory_kind": args.trajectory_kind,
            },
        },
    )
    out = output_dir(args, COMMAND)
    with command_run(out, COMMAND, config):
        manifest = generate_dataset(config, out, args.workers)
        summary = {
            "n": len(manifest.entries),
            "splits": manifest.split_counts(),
            "mode": config.mode.value,
        }
        write_json(summary, out / "gen_summary.json")
    logger.info(f"✅ Wrote {out / MANIFEST_FILE}")
    return 0
