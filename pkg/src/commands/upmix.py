"""
`upmix`: learn a trajectory-driven mono-to-stereo mask on the training split
and score it, the renderer oracle and mono duplication on an evaluation split.
"""

import argparse
import logging
from pathlib import Path

import numpy as np

from src.downstream.upmix import UpmixExample, train_upmix_mask, upmix_learned, upmix_oracle
from src.dsp.stft import istft_clip
from src.learning.trainer import EmptySplitError
from src.models.schemas import Split, UpmixClipResult, UpmixParams
from src.scenes.transforms import downmix_to_mono
from src.services.artifacts import write_csv, write_json
from src.services.audio_io import write_wav
from .common import (
    add_common_arguments,
    command_run,
    load_entries,
    output_dir,
    resolve_params,
    scene_params_for,
)

logger = logging.getLogger(__name__)

COMMAND = "upmix"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(COMMAND, help="Upmix mono audio to stereo from trajectories")
    add_common_arguments(parser)
    parser.add_argument("--manifest", help="Stereo dataset manifest.json")
    parser.add_argument("--split", choices=[s.value for s in Split], help="Evaluation split")
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--write-audio", action="store_true", default=None)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    params = resolve_params(
        UpmixParams,
        args.config,
        COMMAND,
        {
            "manifest": args.manifest,
            "split": args.split,
            "epochs": args.epochs,
            "seed": args.seed,
            "write_audio": args.write_audio,
        },
    )
    out = output_dir(args, COMMAND)
    with command_run(out, COMMAND, params):
        manifest_path = Path(params.manifest)
        scene = scene_params_for(manifest_path, params.scene)
        _, train_entries = load_entries(manifest_path, Split.TRAIN)
        _, eval_entries = load_entries(manifest_path, params.split)
        if not train_entries:
            raise EmptySplitError(Split.TRAIN)
        if not eval_entries:
            raise EmptySplitError(params.split)

        examples = [UpmixExample.from_scene(item.audio, item.trajectory) for item in train_entries]
        mask = train_upmix_mask(examples, params.epochs, params.lr, seed=params.seed)

        rows = []
        for item in eval_entries:
            mono = downmix_to_mono(item.audio)
            learned = upmix_learned(mask, mono, item.trajectory, item.audio)
            oracle = upmix_oracle(mono, item.trajectory, item.audio, scene)
            for method, result in (("learned", learned), ("oracle", oracle)):
                rows.append(
                    UpmixClipResult(
                        id=item.entry.id,
                        method=method,
                        l1_complex=result.l1_complex,
                        baseline_l1=result.baseline_l1,
                    ).model_dump()
                )
            if params.write_audio:
                write_wav(
                    istft_clip(learned.predicted, mono.n_samples),
                    out / "audio" / f"{item.entry.id}.wav",
                )

        write_csv(rows, out / "upmix.csv", columns=["id", "method", "l1_complex", "baseline_l1"])

        def mean_l1(method: str, key: str = "l1_complex") -> float:
            return float(np.mean([r[key] for r in rows if r["method"] == method]))

        summary = {
            "n": len(eval_entries),
            "learned_l1": mean_l1("learned"),
            "oracle_l1": mean_l1("oracle"),
            "baseline_l1": mean_l1("learned", "baseline_l1"),
            "mask": {"a": mask.a, "b": mask.b, "c": mask.c},
            "train_loss": mask.history,
        }
        write_json(summary, out / "upmix_summary.json")
        logger.info(
            f"Upmix L1: learned {summary['learned_l1']:.4f}, oracle {summary['oracle_l1']:.4f}, "
            f"baseline {summary['baseline_l1']:.4f}"
        )
    return 0
