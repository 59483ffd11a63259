import json

import pandas as pd
import pytest

from src.main import EXIT_EXPECTED, main
from src.models.schemas import DatasetManifest
from src.services.manifest import save_manifest


def _snapshot(root):
    return {p.relative_to(root): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def _last_error(capsys) -> dict:
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def _gen(out, *extra):
    args = ["gen", "--n", "40", "--seed", "7", "--duration-s", "1.0", "--out", str(out)]
    return main([*args, *extra])


def test_gen_is_reproducible(tmp_path):
    assert _gen(tmp_path / "a") == 0
    assert _gen(tmp_path / "b", "--workers", "3") == 0
    assert _snapshot(tmp_path / "a") == _snapshot(tmp_path / "b")

    summary = json.loads((tmp_path / "a" / "gen_summary.json").read_text())
    assert summary == {"n": 40, "splits": {"train": 32, "val": 4, "test": 4}, "mode": "flip"}


def test_run_config_replays_the_run(tmp_path):
    assert _gen(tmp_path / "a", "--snr-db", "20") == 0
    run_config = json.loads((tmp_path / "a" / "run_config.json").read_text())
    assert run_config["command"] == "gen"
    assert run_config["params"]["scene"]["snr_db"] == 20.0

    config = str(tmp_path / "a" / "run_config.json")
    assert main(["gen", "--config", config, "--out", str(tmp_path / "b")]) == 0
    assert _snapshot(tmp_path / "a") == _snapshot(tmp_path / "b")


def test_config_from_another_command_is_rejected(tmp_path, capsys):
    assert _gen(tmp_path / "a") == 0
    capsys.readouterr()
    config = str(tmp_path / "a" / "run_config.json")
    assert main(["train", "--config", config, "--out", str(tmp_path / "t")]) == EXIT_EXPECTED
    assert _last_error(capsys)["code"] == "command_mismatch"


def test_train_on_empty_manifest(tmp_path, capsys):
    manifest = save_manifest(DatasetManifest(), tmp_path / "manifest.json")
    code = main(["train", "--manifest", str(manifest), "--out", str(tmp_path / "train")])
    assert code == EXIT_EXPECTED
    error = _last_error(capsys)
    assert error["code"] == "empty_split"
    assert "empty split" in error["error"]
    # The resolved config is still written for a failed run
    assert (tmp_path / "train" / "run_config.json").exists()


def test_missing_required_flag(tmp_path, capsys):
    assert main(["eval", "--out", str(tmp_path)]) == EXIT_EXPECTED
    assert _last_error(capsys)["code"] == "config"


def test_unknown_command_exits_with_usage(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["bogus"])
    assert excinfo.value.code == EXIT_EXPECTED
    error = _last_error(capsys)
    assert error["code"] == "usage"
    assert error["type"] == "ConfigError"


def test_bad_flag_value_is_reported_as_json(tmp_path, capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["gen", "--n", "many", "--out", str(tmp_path)])
    assert excinfo.value.code == EXIT_EXPECTED
    assert "--n" in _last_error(capsys)["error"]


def test_gen_train_eval_report_pipeline(tmp_path):
    run_dir = tmp_path / "run"
    assert _gen(run_dir / "gen") == 0
    manifest = str(run_dir / "gen" / "manifest.json")
    train = ["train", "--manifest", manifest, "--epochs", "3", "--out", str(run_dir / "train")]
    assert main(train) == 0
    checkpoint = run_dir / "train" / "checkpoint.json"
    assert checkpoint.exists()
    epochs = pd.read_csv(run_dir / "train" / "epochs.csv")
    assert list(epochs.columns) == ["epoch", "loss", "val_acc"]
    assert len(epochs) == 3

    evaluate = ["eval", "--manifest", manifest, "--checkpoint", str(checkpoint)]
    assert main([*evaluate, "--out", str(run_dir / "eval")]) == 0
    results = json.loads((run_dir / "eval" / "eval.json").read_text())["results"]
    assert [r["split"] for r in results] == ["train", "val", "test"]
    assert all(0.0 <= r["accuracy"] <= 1.0 for r in results)

    report_dir = tmp_path / "report"
    assert main(["report", str(run_dir), "--out", str(report_dir)]) == 0
    assert not (run_dir / "report").exists()
    report = pd.read_csv(report_dir / "report.csv")
    assert {"gen_summary", "train_report", "eval"} <= set(report["artifact"])
    assert "results.test.accuracy" in set(report["metric"])
    assert (report_dir / "report.md").read_text().startswith("# Run report")


def test_report_on_missing_directory(tmp_path, capsys):
    assert main(["report", str(tmp_path / "nowhere")]) == EXIT_EXPECTED
    assert _last_error(capsys)["code"] == "not_found"
