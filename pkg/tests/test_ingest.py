"""Loader/writer behavior for the recording directory layout."""

from pathlib import Path

import numpy as np
import pytest

from fallkit.activities import ActivityCode, BodyPosition, SensorKind
from fallkit.ingest import (
    EmptyDatasetError,
    LoadStats,
    MalformedRowWarning,
    MissingFileError,
    OrphanRowWarning,
    SensorRecording,
    TimestampOrderWarning,
    load_dataset,
    write_dataset,
)
from fallkit.synthetic import SyntheticSpec, generate_synthetic


def _write_minimal_tree(root: Path, orphan: bool = False, malformed: bool = False) -> None:
    pos = root / "1" / "left"
    pos.mkdir(parents=True)
    (pos / "sampling.csv").write_text(
        "id,exercise,position,start,end,withRifle\n"
        "1,FALL_3,left,0,10000,1\n"
    )
    acc_rows = ["sampling,timestamp,x,y,z", "1,0,0.1,0.2,9.8", "1,11,0.2,0.1,9.7"]
    if orphan:
        acc_rows.append("99,22,1.0,1.0,1.0")
    if malformed:
        acc_rows.append("1,33,not-a-number,0,0")
    (pos / "acceleration.csv").write_text("\n".join(acc_rows) + "\n")
    (pos / "angular_speed.csv").write_text(
        "sampling,timestamp,x,y,z\n1,0,0.01,0.02,0.03\n1,11,0.02,0.01,0.04\n"
    )


def test_minimal_tree_yields_one_recording_per_kind(tmp_path):
    _write_minimal_tree(tmp_path)
    recordings = load_dataset(tmp_path)
    assert len(recordings) == 2
    assert {r.kind for r in recordings} == {
        SensorKind.LINEAR_ACCELERATION,
        SensorKind.ANGULAR_SPEED,
    }
    assert all(r.subject_id == 1 for r in recordings)


def test_with_rifle_flag_parsed(tmp_path):
    _write_minimal_tree(tmp_path)
    rec = load_dataset(tmp_path)[0]
    assert rec.activity == ActivityCode("FALL", 3, with_rifle=True)


def test_orphan_row_dropped_with_warning(tmp_path):
    _write_minimal_tree(tmp_path, orphan=True)
    stats = LoadStats()
    with pytest.warns(OrphanRowWarning):
        recordings = load_dataset(tmp_path, stats=stats)
    assert stats.orphan_rows == 1
    acc = next(r for r in recordings if r.kind is SensorKind.LINEAR_ACCELERATION)
    assert acc.n_samples == 2  # orphan row excluded


def test_malformed_row_skipped_with_location(tmp_path):
    _write_minimal_tree(tmp_path, malformed=True)
    stats = LoadStats()
    with pytest.warns(MalformedRowWarning, match=r"acceleration\.csv:4"):
        load_dataset(tmp_path, stats=stats)
    assert stats.malformed_rows == 1


def test_missing_file_raises(tmp_path):
    _write_minimal_tree(tmp_path)
    (tmp_path / "1" / "left" / "angular_speed.csv").unlink()
    with pytest.raises(MissingFileError):
        load_dataset(tmp_path)


def test_empty_dataset_raises(tmp_path):
    (tmp_path / "1" / "left").mkdir(parents=True)
    for name in ("sampling.csv", "acceleration.csv", "angular_speed.csv"):
        (tmp_path / "1" / "left" / name).write_text("header\n")
    with pytest.raises(EmptyDatasetError):
        load_dataset(tmp_path)


def test_out_of_order_timestamps_sorted_with_warning(tmp_path):
    pos = tmp_path / "2" / "chest"
    pos.mkdir(parents=True)
    (pos / "sampling.csv").write_text(
        "id,exercise,position,start,end,withRifle\n1,ADL_1,chest,0,1000,0\n"
    )
    (pos / "acceleration.csv").write_text(
        "sampling,timestamp,x,y,z\n1,10,1,1,1\n1,5,2,2,2\n1,20,3,3,3\n"
    )
    (pos / "angular_speed.csv").write_text("sampling,timestamp,x,y,z\n1,0,0,0,0\n")
    with pytest.warns(TimestampOrderWarning):
        recordings = load_dataset(tmp_path)
    acc = next(r for r in recordings if r.kind is SensorKind.LINEAR_ACCELERATION)
    assert list(acc.timestamps) == [5, 10, 20]
    assert acc.values[0, 0] == 2.0  # row followed its timestamp


def test_round_trip_preserves_recordings(tmp_path):
    spec = SyntheticSpec(
        subjects=2,
        activities=[ActivityCode("FALL", 1), ActivityCode("ADL", 7)],
        rate_hz=90.0,
        seed=13,
        positions=(BodyPosition.LEFT_WRIST, BodyPosition.CHEST),
    )
    original = generate_synthetic(spec)
    write_dataset(original, tmp_path)
    reloaded = load_dataset(tmp_path)
    assert len(reloaded) == len(original)

    def key(r):
        return (r.subject_id, r.position.value, r.sampling_id, r.kind.value)

    by_key = {key(r): r for r in reloaded}
    for rec in original:
        other = by_key[key(rec)]
        assert rec == other  # exact: metadata, timestamps, and float values


def test_sample_count_matches_non_orphan_rows(tmp_path):
    _write_minimal_tree(tmp_path, orphan=True)
    with pytest.warns(OrphanRowWarning):
        recordings = load_dataset(tmp_path)
    for rec in recordings:
        assert rec.n_samples == 2


def test_recording_invariants():
    with pytest.raises(ValueError):
        SensorRecording(
            sampling_id="1",
            subject_id=1,
            position=BodyPosition.CHEST,
            kind=SensorKind.LINEAR_ACCELERATION,
            activity=ActivityCode("ADL", 1),
            start_ts=0,
            end_ts=10,
            timestamps=np.array([5, 3]),  # decreasing
            values=np.zeros((2, 3)),
        )
    with pytest.raises(ValueError):
        SensorRecording(
            sampling_id="1",
            subject_id=1,
            position=BodyPosition.CHEST,
            kind=SensorKind.LINEAR_ACCELERATION,
            activity=ActivityCode("ADL", 1),
            start_ts=0,
            end_ts=10,
            timestamps=np.array([], dtype=np.int64),
            values=np.zeros((0, 3)),
        )
