import json

import numpy as np
import pytest

from src.models.audio import AudioClip, AudioError, AudioLayout, SourceTrajectory
from src.models.schemas import AlignmentLabel, DatasetManifest, ManifestEntry, Split
from src.services.audio_io import write_trajectory, write_wav
from src.services.manifest import ManifestError, load_manifest, save_manifest
from src.validators.manifest_validator import ManifestValidator


def _entry(tmp_path, name: str, layout: AudioLayout, label: AlignmentLabel) -> ManifestEntry:
    write_wav(AudioClip(np.zeros((layout.channels, 1600)), 16000, layout), tmp_path / f"{name}.wav")
    write_trajectory(SourceTrajectory.constant(0.0, 0.1), tmp_path / f"{name}.json")
    return ManifestEntry(
        id=name,
        audio_path=f"{name}.wav",
        trajectory_path=f"{name}.json",
        label=label,
        scene_seed=1,
        split=Split.TRAIN,
    )


def test_manifest_round_trip(tmp_path):
    manifest = DatasetManifest(
        entries=[
            _entry(tmp_path, "a", AudioLayout.STEREO, AlignmentLabel.flipped()),
            _entry(tmp_path, "b", AudioLayout.FOA, AlignmentLabel.rotated(3.0)),
        ]
    )
    loaded = load_manifest(save_manifest(manifest, tmp_path / "manifest.json"))
    assert loaded == manifest
    assert loaded.entries[1].label.theta_rad == pytest.approx(3.0)
    assert loaded.split_counts() == {"train": 2, "val": 0, "test": 0}


def test_duplicate_ids_are_rejected(tmp_path):
    entry = _entry(tmp_path, "a", AudioLayout.STEREO, AlignmentLabel.aligned_pair())
    payload = {"version": 1, "entries": [entry.model_dump(mode="json")] * 2}
    (tmp_path / "manifest.json").write_text(json.dumps(payload))
    with pytest.raises(ManifestError) as excinfo:
        load_manifest(tmp_path / "manifest.json")
    assert excinfo.value.code == "schema"


def test_missing_audio_file_is_rejected(tmp_path):
    entry = _entry(tmp_path, "a", AudioLayout.STEREO, AlignmentLabel.aligned_pair())
    (tmp_path / "a.wav").unlink()
    save_manifest(DatasetManifest(entries=[entry]), tmp_path / "manifest.json")
    with pytest.raises(ManifestError) as excinfo:
        load_manifest(tmp_path / "manifest.json")
    assert excinfo.value.code == "invalid"
    assert load_manifest(tmp_path / "manifest.json", check_files=False).entries == [entry]


def test_rotation_label_on_stereo_clip_is_rejected(tmp_path):
    entry = _entry(tmp_path, "a", AudioLayout.STEREO, AlignmentLabel.rotated(1.0))
    save_manifest(DatasetManifest(entries=[entry]), tmp_path / "manifest.json")
    with pytest.raises(ManifestError, match="rotation label"):
        load_manifest(tmp_path / "manifest.json")

def test_stereo_azimuth_beyond_frontal_range_is_rejected(tmp_path):
    entry = _entry(tmp_path, "a", AudioLayout.STEREO, AlignmentLabel.aligned_pair())
    write_trajectory(SourceTrajectory.constant(2.0, 0.1), tmp_path / "a.json")
    manifest = DatasetManifest(entries=[entry])
    save_manifest(manifest, tmp_path / "manifest.json")
    with pytest.raises(ManifestError, match="azimuth") as excinfo:
        load_manifest(tmp_path / "manifest.json")
    assert excinfo.value.code == "invalid"

    result = ManifestValidator().validate(manifest, tmp_path)
    assert not result.valid
    assert "stereo range" in result.format_errors()


def test_foa_accepts_rear_azimuths(tmp_path):
    entry = _entry(tmp_path, "a", AudioLayout.FOA, AlignmentLabel.aligned_pair())
    write_trajectory(SourceTrajectory.constant(2.0, 0.1), tmp_path / "a.json")
    assert ManifestValidator().validate(DatasetManifest(entries=[entry]), tmp_path).valid


def test_check_range_reports_layout_limit():
    trajectory = SourceTrajectory.constant(-2.0, 0.1)
    trajectory.check_range(AudioLayout.FOA)
    with pytest.raises(AudioError) as excinfo:
        trajectory.check_range(AudioLayout.STEREO)
    assert excinfo.value.code == "azimuth_range"


def test_empty_splits_are_warnings(tmp_path):
    entry = _entry(tmp_path, "a", AudioLayout.STEREO, AlignmentLabel.aligned_pair())
    result = ManifestValidator().validate(DatasetManifest(entries=[entry]), tmp_path)
    assert result.valid
    assert not result.has_errors
    assert result.has_warnings
    assert "split 'val' is empty" in result.format_warnings()
    assert "split 'test' is empty" in result.format_warnings()
    assert result.format_errors() == "No errors"


def test_missing_manifest(tmp_path):
    with pytest.raises(ManifestError) as excinfo:
        load_manifest(tmp_path / "nope.json")
    assert excinfo.value.code == "not_found"


def test_label_consistency_is_enforced():
    with pytest.raises(ValueError):
        AlignmentLabel(aligned=True, misalignment="flip")
    assert AlignmentLabel.rotated(-0.5).theta_rad == pytest.approx(2 * np.pi - 0.5)
