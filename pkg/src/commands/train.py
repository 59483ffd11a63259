"""
`train`: fit the alignment model on a manifest and write the checkpoint.
"""

import argparse
import logging
from pathlib import Path

import numpy as np

from src.learning.trainer import TrainingDiverged, epoch_rows, featurize_manifest, train
from src.models.schemas import FeatureMode, Split, TrainParams
from src.services.artifacts import write_csv, write_json
from src.services.manifest import load_manifest
from .common import add_common_arguments, command_run, output_dir, resolve_params

logger = logging.getLogger(__name__)

COMMAND = "train"
CHECKPOINT_FILE = "checkpoint.json"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(COMMAND, help="Train the alignment model")
    add_common_arguments(parser)
    parser.add_argument("--manifest", help="Dataset manifest.json")
    parser.add_argument("--seed", type=int, help="Initialisation and shuffling seed")
    parser.add_argument("--features", choices=[m.value for m in FeatureMode])
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--hidden", type=int)
    parser.add_argument(
        "--ablate", nargs="+", metavar="CHANNEL", help="Channel names to zero, e.g. x y z"
    )
    parser.add_argument(
        "--scramble-labels", action="store_true", default=None, help="Chance-level control"
    )
    parser.add_argument("--workers", type=int)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    params = resolve_params(
        TrainParams,
        args.config,
        COMMAND,
        {
            "manifest": args.manifest,
            "scramble_labels": args.scramble_labels,
            "hyper": {
                "seed": args.seed,
                "feature_mode": args.features,
                "epochs": args.epochs,
                "hidden": args.hidden,
                "ablate_channels": args.ablate,
            },
        },
    )
    hyper = params.hyper
    out = output_dir(args, COMMAND)
    with command_run(out, COMMAND, params):
        manifest_path = Path(params.manifest)
        manifest = load_manifest(manifest_path)
        datasets = featurize_manifest(
            manifest,
            manifest_path.parent,
            hyper.feature_mode,
            hyper.ablate_channels,
            args.workers,
        )
        if params.scramble_labels:
            train_set = datasets[Split.TRAIN]
            shuffled = np.random.default_rng(hyper.seed).permutation(train_set.y)
            datasets[Split.TRAIN] = train_set.with_labels(shuffled)
            logger.info("Training on permuted labels")

        try:
            model, report = train(datasets, hyper)
        except TrainingDiverged as e:
            write_json(e.report, out / "train_report.json")
            raise
        model.save(out / CHECKPOINT_FILE)
        write_json(report, out / "train_report.json")
        write_csv(epoch_rows(report), out / "epochs.csv", columns=["epoch", "loss", "val_acc"])
    return 0
