"""
`report`: collect every command summary under a run directory into one CSV
and a markdown overview.
"""

import argparse
import logging
from pathlib import Path
from typing import Any, Dict, Iterator, List, Tuple

import pandas as pd

from src.core.errors import ConfigError
from src.models.schemas import ReportParams
from src.services.artifacts import read_json, write_csv
from .common import add_common_arguments, command_run, output_dir, resolve_params

logger = logging.getLogger(__name__)

COMMAND = "report"
SUMMARY_FILES = (
    "gen_summary.json",
    "train_report.json",
    "eval.json",
    "analysis.json",
    "doa_summary.json",
    "align_summary.json",
    "upmix_summary.json",
    "separation_summary.json",
)
REPORT_COLUMNS = ["run", "artifact", "metric", "value"]


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(COMMAND, help="Aggregate run summaries")
    add_common_arguments(parser)
    parser.add_argument("run_dir", nargs="?", help="Directory holding command outputs")
    parser.set_defaults(handler=run)


def flatten_metrics(payload: Any, prefix: str = "") -> Iterator[Tuple[str, float]]:
    """Numeric leaves as dotted paths; list items are keyed by their split or index."""
    if isinstance(payload, dict):
        for key in sorted(payload):
            yield from flatten_metrics(payload[key], f"{prefix}.{key}" if prefix else str(key))
    elif isinstance(payload, list):
        # Per-epoch histories are in the CSVs already
        if prefix.endswith(("epochs", "train_loss", "explained_variance_ratio")):
            return
        for index, item in enumerate(payload):
            tag = item.get("split", index) if isinstance(item, dict) else index
            yield from flatten_metrics(item, f"{prefix}.{tag}")
    elif isinstance(payload, bool):
        yield prefix, float(payload)
    elif isinstance(payload, (int, float)):
        yield prefix, float(payload)


def collect(run_dir: Path) -> List[Dict[str, Any]]:
    rows = []
    for name in SUMMARY_FILES:
        for path in sorted(run_dir.rglob(name)):
            run = path.parent.relative_to(run_dir).as_posix() or "."
            for metric, value in flatten_metrics(read_json(path)):
                rows.append({"run": run, "artifact": path.stem, "metric": metric, "value": value})
    return rows


def render_markdown(frame: pd.DataFrame) -> str:
    lines = ["# Run report", ""]
    for (run, artifact), group in frame.groupby(["run", "artifact"], sort=True):
        lines += [f"## {run} / {artifact}", "", "| metric | value |", "|---|---|"]
        lines += [f"| {row.metric} | {row.value:.6g} |" for row in group.itertuples()]
        lines.append("")
    return "\n".join(lines)


def run(args: argparse.Namespace) -> int:
    params = resolve_params(ReportParams, args.config, COMMAND, {"run_dir": args.run_dir})
    run_dir = Path(params.run_dir)
    if not run_dir.is_dir():
        raise ConfigError(f"run directory not found: {run_dir}", code="not_found")

    out = output_dir(args, COMMAND)
    with command_run(out, COMMAND, params):
        rows = collect(run_dir)
        if not rows:
            logger.warning(f"⚠️  No summaries found under {run_dir}")
        write_csv(rows, out / "report.csv", columns=REPORT_COLUMNS)
        frame = pd.DataFrame(rows, columns=REPORT_COLUMNS)
        (out / "report.md").write_text(render_markdown(frame) + "\n", encoding="utf-8")
        logger.info(f"✅ Collected {len(rows)} metrics from {run_dir}")
    return 0
