"""
`eval`: pretext accuracy of a checkpoint on each manifest split.
"""

import argparse
import logging
from pathlib import Path

import numpy as np

from src.learning.network import AlignmentModel
from src.learning.trainer import EmptySplitError, evaluate_accuracy, featurize_manifest
from src.models.schemas import AccuracyResult, EvalParams, Split
from src.services.artifacts import write_json
from src.services.manifest import load_manifest
from .common import add_common_arguments, command_run, output_dir, resolve_params

logger = logging.getLogger(__name__)

COMMAND = "eval"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(COMMAND, help="Evaluate pretext accuracy")
    add_common_arguments(parser)
    parser.add_argument("--manifest", help="Dataset manifest.json")
    parser.add_argument("--checkpoint", help="Trained checkpoint.json")
    parser.add_argument("--splits", nargs="+", choices=[s.value for s in Split])
    parser.add_argument("--workers", type=int)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    params = resolve_params(
        EvalParams,
        args.config,
        COMMAND,
        {"manifest": args.manifest, "checkpoint": args.checkpoint, "splits": args.splits},
    )
    out = output_dir(args, COMMAND)
    with command_run(out, COMMAND, params):
        model = AlignmentModel.load(Path(params.checkpoint))
        manifest_path = Path(params.manifest)
        datasets = featurize_manifest(
            load_manifest(manifest_path),
            manifest_path.parent,
            model.feature_mode,
            model.hyper.ablate_channels,
            args.workers,
        )

        results = []
        for split in params.splits:
            dataset = datasets[split]
            if dataset.n == 0:
                logger.warning(f"⚠️  Skipping empty split '{split.value}'")
                continue
            accuracy = evaluate_accuracy(model, dataset)
            results.append(
                AccuracyResult(
                    split=split, n=dataset.n, accuracy=accuracy, base_rate=float(np.mean(dataset.y))
                )
            )
            logger.info(f"{split.value}: accuracy {accuracy:.3f} on {dataset.n} clips")
        if not results:
            raise EmptySplitError("+".join(s.value for s in params.splits))
        write_json({"results": results}, out / "eval.json")
    return 0
