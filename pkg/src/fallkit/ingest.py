"""Reading and writing IPqM-Fall-format directory trees.

Layout per subject::

    <root>/<subject-id>/{chest,left,right}/
        sampling.csv        id, exercise name, body position, start ts, end ts, withRifle
        acceleration.csv    sampling, timestamp, x, y, z
        angular_speed.csv   sampling, timestamp, x, y, z

Timestamps are integer milliseconds.  The ``id`` column of sampling.csv is the
foreign key joined against the ``sampling`` column of the two sensor files.
Rows that fail to parse are skipped with a :class:`MalformedRowWarning`; sensor
rows whose key matches no sampling row are dropped with an
:class:`OrphanRowWarning`.
"""

from __future__ import annotations

import csv
import logging
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .activities import ActivityCode, BodyPosition, SensorKind

log = logging.getLogger(__name__)

SAMPLING_FILE = "sampling.csv"
SENSOR_FILES = {
    SensorKind.LINEAR_ACCELERATION: "acceleration.csv",
    SensorKind.ANGULAR_SPEED: "angular_speed.csv",
}
POSITION_DIRS = {
    "chest": BodyPosition.CHEST,
    "left": BodyPosition.LEFT_WRIST,
    "right": BodyPosition.RIGHT_WRIST,
}


class MissingFileError(FileNotFoundError):
    """A position directory lacks one of its three required CSV files."""


class EmptyDatasetError(ValueError):
    """The directory tree produced zero recordings."""


class MalformedRowWarning(UserWarning):
    """A CSV row with a non-numeric field or wrong column count was skipped."""


class OrphanRowWarning(UserWarning):
    """A sensor row referenced a sampling id absent from sampling.csv."""


class TimestampOrderWarning(UserWarning):
    """Out-of-order sample timestamps were stably sorted at load."""


class SensorSample(NamedTuple):
    timestamp: int
    x: float
    y: float
    z: float


@dataclass(frozen=True)
class SensorRecording:
    """One activity trial from one device position, for a single sensor kind.

    ``timestamps`` is int64 milliseconds, non-decreasing; ``values`` is an
    (n, 3) float64 array of x/y/z components.  Instances are immutable and
    safe to share across threads.
    """

    sampling_id: str
    subject_id: int
    position: BodyPosition
    kind: SensorKind
    activity: ActivityCode
    start_ts: int
    end_ts: int
    timestamps: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        ts = np.asarray(self.timestamps, dtype=np.int64)
        vals = np.asarray(self.values, dtype=np.float64)
        if ts.size == 0:
            raise ValueError("recording has no samples")
        if vals.shape != (ts.size, 3):
            raise ValueError(f"values shape {vals.shape} does not match {ts.size} timestamps")
        if np.any(np.diff(ts) < 0):
            raise ValueError("timestamps must be non-decreasing")
        if ts[0] < self.start_ts or ts[-1] > self.end_ts:
            raise ValueError("sample timestamps fall outside [start_ts, end_ts]")
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "values", vals)
        self.timestamps.setflags(write=False)
        self.values.setflags(write=False)

    @property
    def n_samples(self) -> int:
        return int(self.timestamps.size)

    def sample(self, i: int) -> SensorSample:
        return SensorSample(int(self.timestamps[i]), *self.values[i])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SensorRecording):
            return NotImplemented
        return (
            self.sampling_id == other.sampling_id
            and self.subject_id == other.subject_id
            and self.position == other.position
            and self.kind == other.kind
            and self.activity == other.activity
            and self.start_ts == other.start_ts
            and self.end_ts == other.end_ts
            and np.array_equal(self.timestamps, other.timestamps)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass
class LoadStats:
    """Counters for anomalies encountered during a load."""

    malformed_rows: int = 0
    orphan_rows: int = 0
    unsorted_recordings: int = 0
    files: int = 0
    by_file: dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class _SamplingRow:
    sampling_id: str
    activity: ActivityCode
    start_ts: int
    end_ts: int


def _read_sampling(path: Path, stats: LoadStats) -> dict[str, _SamplingRow]:
    rows: dict[str, _SamplingRow] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return rows
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            try:
                if len(rec) != 6:
                    raise ValueError(f"expected 6 columns, got {len(rec)}")
                sid, name, _pos, start_s, end_s, rifle_s = (c.strip() for c in rec)
                rifle = int(rifle_s)
                if rifle not in (0, 1):
                    raise ValueError(f"withRifle must be 0 or 1, got {rifle_s!r}")
                rows[sid] = _SamplingRow(
                    sampling_id=sid,
                    activity=ActivityCode.parse(name, with_rifle=bool(rifle)),
                    start_ts=int(start_s),
                    end_ts=int(end_s),
                )
            except ValueError as exc:
                stats.malformed_rows += 1
                warnings.warn(
                    f"{path}:{lineno}: skipped malformed sampling row ({exc})",
                    MalformedRowWarning,
                    stacklevel=2,
                )
    return rows


def _read_sensor(
    path: Path, known_ids: dict[str, _SamplingRow], stats: LoadStats
) -> dict[str, list[tuple[int, float, float, float]]]:
    by_id: dict[str, list[tuple[int, float, float, float]]] = {sid: [] for sid in known_ids}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader, None)
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            try:
                if len(rec) != 5:
                    raise ValueError(f"expected 5 columns, got {len(rec)}")
                sid = rec[0].strip()
                ts = int(rec[1])
                x, y, z = float(rec[2]), float(rec[3]), float(rec[4])
            except ValueError as exc:
                stats.malformed_rows += 1
                warnings.warn(
                    f"{path}:{lineno}: skipped malformed sensor row ({exc})",
                    MalformedRowWarning,
                    stacklevel=2,
                )
                continue
            if sid not in by_id:
                stats.orphan_rows += 1
                warnings.warn(
                    f"{path}:{lineno}: sampling id {sid!r} not in {SAMPLING_FILE}; row dropped",
                    OrphanRowWarning,
                    stacklevel=2,
                )
                continue
            by_id[sid].append((ts, x, y, z))
    return by_id


def load_dataset(
    root_path: str | Path, stats: LoadStats | None = None
) -> list[SensorRecording]:
    """Load every recording under an IPqM-Fall-format directory tree.

    Produces one :class:`SensorRecording` per (sampling id, sensor kind).
    Subject ids come from the per-subject directory names; non-numeric
    directories are ignored.  Raises :class:`MissingFileError` when a position
    directory lacks a required CSV and :class:`EmptyDatasetError` when the
    tree yields no recordings at all.
    """
    root = Path(root_path)
    if not root.is_dir():
        raise MissingFileError(f"dataset root {root} is not a directory")
    stats = stats if stats is not None else LoadStats()
    recordings: list[SensorRecording] = []

    for subject_dir in sorted(root.iterdir()):
        if not subject_dir.is_dir() or not subject_dir.name.isdigit():
            continue
        subject_id = int(subject_dir.name)
        for pos_name, position in POSITION_DIRS.items():
            pos_dir = subject_dir / pos_name
            if not pos_dir.is_dir():
                continue
            sampling_path = pos_dir / SAMPLING_FILE
            if not sampling_path.is_file():
                raise MissingFileError(f"{pos_dir} lacks {SAMPLING_FILE}")
            for fname in SENSOR_FILES.values():
                if not (pos_dir / fname).is_file():
                    raise MissingFileError(f"{pos_dir} lacks {fname}")
            sampling = _read_sampling(sampling_path, stats)
            stats.files += 1
            for kind, fname in SENSOR_FILES.items():
                sensor_path = pos_dir / fname
                stats.files += 1
                by_id = _read_sensor(sensor_path, sampling, stats)
                for sid, rows in by_id.items():
                    if not rows:
                        continue
                    meta = sampling[sid]
                    ts = np.array([r[0] for r in rows], dtype=np.int64)
                    vals = np.array([r[1:] for r in rows], dtype=np.float64)
                    if np.any(np.diff(ts) < 0):
                        stats.unsorted_recordings += 1
                        warnings.warn(
                            f"{sensor_path}: sampling id {sid!r} had out-of-order "
                            "timestamps; stably sorted",
                            TimestampOrderWarning,
                            stacklevel=2,
                        )
                        order = np.argsort(ts, kind="stable")
                        ts, vals = ts[order], vals[order]
                    recordings.append(
                        SensorRecording(
                            sampling_id=sid,
                            subject_id=subject_id,
                            position=position,
                            kind=kind,
                            activity=meta.activity,
                            start_ts=min(meta.start_ts, int(ts[0])),
                            end_ts=max(meta.end_ts, int(ts[-1])),
                            timestamps=ts,
                            values=vals,
                        )
                    )
    if not recordings:
        raise EmptyDatasetError(f"no recordings found under {root}")
    log.info(
        "loaded %d recordings from %s (%d malformed rows, %d orphan rows skipped)",
        len(recordings),
        root,
        stats.malformed_rows,
        stats.orphan_rows,
    )
    return recordings


def write_dataset(recordings: list[SensorRecording], root_path: str | Path) -> None:
    """Write recordings back out in the same directory layout ``load_dataset`` reads.

    Float components are written with ``repr`` so a write/load round trip
    reproduces the binary values exactly.
    """
    root = Path(root_path)
    groups: dict[tuple[int, BodyPosition], list[SensorRecording]] = {}
    for rec in recordings:
        groups.setdefault((rec.subject_id, rec.position), []).append(rec)

    for (subject_id, position), group in sorted(
        groups.items(), key=lambda kv: (kv[0][0], kv[0][1].value)
    ):
        pos_dir = root / str(subject_id) / position.value
        pos_dir.mkdir(parents=True, exist_ok=True)
        seen: dict[str, SensorRecording] = {}
        for rec in group:
            seen.setdefault(rec.sampling_id, rec)
        with open(pos_dir / SAMPLING_FILE, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["id", "exercise", "position", "start", "end", "withRifle"])
            for sid, rec in sorted(seen.items(), key=lambda kv: _id_sort_key(kv[0])):
                writer.writerow(
                    [
                        sid,
                        f"{rec.activity.family}_{rec.activity.index}",
                        position.value,
                        rec.start_ts,
                        rec.end_ts,
                        int(rec.activity.with_rifle),
                    ]
                )
        for kind, fname in SENSOR_FILES.items():
            with open(pos_dir / fname, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(["sampling", "timestamp", "x", "y", "z"])
                for rec in sorted(
                    (r for r in group if r.kind is kind),
                    key=lambda r: _id_sort_key(r.sampling_id),
                ):
                    for i in range(rec.n_samples):
                        x, y, z = rec.values[i]
                        writer.writerow(
                            [
                                rec.sampling_id,
                                int(rec.timestamps[i]),
                                repr(float(x)),
                                repr(float(y)),
                                repr(float(z)),
                            ]
                        )


def _id_sort_key(sid: str) -> tuple[int, ...]:
    return (0, int(sid)) if sid.isdigit() else (1, *sid.encode())
