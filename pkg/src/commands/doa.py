"""
`doa`: per-clip direction of arrival from spatial cues; with an FOA
checkpoint, also one-shot DOA from the learned audio embedding.
"""

import argparse
import logging
from pathlib import Path

import numpy as np

from src.downstream.doa import estimate_doa
from src.downstream.one_shot import evaluate_one_shot
from src.learning.network import AlignmentModel
from src.learning.trainer import EmptySplitError
from src.models.audio import AudioLayout
from src.models.schemas import DoaParams, Split
from src.services.artifacts import write_csv, write_json
from .common import (
    add_common_arguments,
    command_run,
    load_entries,
    output_dir,
    resolve_params,
    scene_params_for,
)

logger = logging.getLogger(__name__)

COMMAND = "doa"
DOA_COLUMNS = ["id", "method", "median_azimuth_deg", "mean_error_deg", "flagged_frames", "n_frames"]


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(COMMAND, help="Estimate direction of arrival")
    add_common_arguments(parser)
    parser.add_argument("--manifest", help="Dataset manifest.json")
    parser.add_argument("--split", choices=[s.value for s in Split])
    parser.add_argument("--checkpoint", help="FOA checkpoint for one-shot DOA")
    parser.add_argument("--seed", type=int, help="Seed of the one-shot event set")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    params = resolve_params(
        DoaParams,
        args.config,
        COMMAND,
        {
            "manifest": args.manifest,
            "split": args.split,
            "checkpoint": args.checkpoint,
            "seed": args.seed,
        },
    )
    out = output_dir(args, COMMAND)
    with command_run(out, COMMAND, params):
        manifest_path = Path(params.manifest)
        scene = scene_params_for(manifest_path, params.scene)
        _, loaded = load_entries(manifest_path, params.split)
        if not loaded:
            raise EmptySplitError(params.split)

        results = [
            estimate_doa(item.entry.id, item.audio, item.trajectory, scene) for item in loaded
        ]
        write_csv([r.model_dump() for r in results], out / "doa.csv", columns=DOA_COLUMNS)
        errors = [r.mean_error_deg for r in results if r.mean_error_deg is not None]
        summary = {
            "n": len(results),
            "method": results[0].method,
            "mean_error_deg": float(np.mean(errors)) if errors else None,
            "flagged_frames": sum(r.flagged_frames for r in results),
        }

        if params.checkpoint:
            model = AlignmentModel.load(Path(params.checkpoint))
            if model.layout is AudioLayout.FOA:
                evaluation = evaluate_one_shot(model, params.seed, params.queries_per_class)
                summary["one_shot"] = {
                    "trained_mean_error_deg": evaluation.trained.mean_error_deg,
                    "random_mean_error_deg": evaluation.random.mean_error_deg,
                    "n_queries": int(evaluation.trained.truths.size),
                }
            else:
                logger.warning("⚠️  One-shot DOA needs an FOA checkpoint; skipped")
        write_json(summary, out / "doa_summary.json")
    return 0
