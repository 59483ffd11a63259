"""
`analyze`: PCA of the audio embedding against the true azimuth.
"""

import argparse
import logging
from pathlib import Path

from src.learning.analysis import analyze_embeddings
from src.learning.network import AlignmentModel
from src.learning.trainer import EmptySplitError
from src.models.schemas import AnalyzeParams, Split
from src.services.artifacts import write_csv, write_json
from .common import add_common_arguments, command_run, load_entries, output_dir, resolve_params

logger = logging.getLogger(__name__)

COMMAND = "analyze"
TRACK_COLUMNS = ["id", "frame", "time_s", "azimuth_deg", "pc1", "bin"]


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(COMMAND, help="Correlate embeddings with source azimuth")
    add_common_arguments(parser)
    parser.add_argument("--manifest", help="Dataset manifest.json")
    parser.add_argument("--checkpoint", help="Trained checkpoint.json")
    parser.add_argument("--split", choices=[s.value for s in Split])
    parser.add_argument("--n-bins", type=int, help="Bins of the per-frame track")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    params = resolve_params(
        AnalyzeParams,
        args.config,
        COMMAND,
        {
            "manifest": args.manifest,
            "checkpoint": args.checkpoint,
            "split": args.split,
            "n_bins": args.n_bins,
        },
    )
    out = output_dir(args, COMMAND)
    with command_run(out, COMMAND, params):
        model = AlignmentModel.load(Path(params.checkpoint))
        _, loaded = load_entries(Path(params.manifest), params.split)
        if not loaded:
            raise EmptySplitError(params.split)

        clips = [(item.entry.id, item.audio, item.trajectory) for item in loaded]
        result, rows = analyze_embeddings(model, clips, params.n_bins)
        write_json(result, out / "analysis.json")
        write_csv(rows, out / "track.csv", columns=TRACK_COLUMNS)
        logger.info(
            f"PC1 vs azimuth: spearman={result.pc1_vs_azimuth.spearman} "
            f"pearson={result.pc1_vs_azimuth.pearson}"
        )
    return 0
