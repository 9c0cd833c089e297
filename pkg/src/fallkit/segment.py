"""Cutting recordings into fixed-length labeled window vectors.

Window length L is 450 samples for wrist devices and 1025 for the chest
device.  The cutting rule depends on the activity:

* falls, chair transitions and other short trials: the first L samples
  (impact portion; the ground-contact tail is discarded),
* stair trials: the first L samples, remainder discarded,
* shooting-position transitions OM3-OM8: one vector centered on the global
  acceleration-magnitude peak, shifted inward near the boundaries,
* every other trial of ten seconds or more: consecutive non-overlapping
  length-L tiles, incomplete tail discarded.

Accelerometer and gyroscope streams are aligned by sample index over their
common prefix.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .activities import ActivityCode, BodyPosition, LabelingScheme, label_for
from .ingest import SensorKind, SensorRecording


class TooShortWarning(UserWarning):
    """Recording shorter than half a window; no vector emitted."""


class ChannelMismatchWarning(UserWarning):
    """Acc/gyr sample counts differ by more than 20%; common prefix used."""


@dataclass(frozen=True)
class SegmentVector:
    """One labeled window: 3 accelerometer + 3 gyroscope channels of length L."""

    subject_id: int
    position: BodyPosition
    activity: ActivityCode
    label: int
    acc_xyz: np.ndarray  # (3, L)
    gyr_xyz: np.ndarray  # (3, L)
    sampling_id: str = ""
    start_index: int = 0
    rule: str = ""

    def __post_init__(self) -> None:
        L = self.position.window_length
        if self.acc_xyz.shape != (3, L) or self.gyr_xyz.shape != (3, L):
            raise ValueError(
                f"channels must be (3, {L}); got {self.acc_xyz.shape} / {self.gyr_xyz.shape}"
            )
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label}")

    @property
    def length(self) -> int:
        return self.acc_xyz.shape[1]


def padding_policy(samples: np.ndarray, length: int) -> np.ndarray:
    """Extend a channel to ``length`` by repeating its final value.

    Accepts inputs with ceil(length/2) <= n <= length along the last axis;
    length-n inputs are returned unchanged.
    """
    samples = np.asarray(samples)
    n = samples.shape[-1]
    if n == length:
        return samples
    if n > length or 2 * n < length:
        raise ValueError(f"padding needs ceil(L/2) <= n <= L; got n={n}, L={length}")
    pad = np.repeat(samples[..., -1:], length - n, axis=-1)
    return np.concatenate([samples, pad], axis=-1)


def _rule_for(activity: ActivityCode) -> str:
    fam, idx = activity.family, activity.index
    if fam == "FALL" or (fam == "ADL" and idx in (7, 8)):
        return "first"  # impact portion / whole short trial
    if fam == "ADL" and idx in (5, 6, 15):
        return "stairs"  # first window only, short staircase
    if fam == "OM" and idx in (3, 4, 5, 6, 7, 8):
        return "peak"  # centered on the transition
    return "tile"


def _window_starts(n: int, L: int, rule: str, acc: np.ndarray) -> list[int]:
    if rule == "tile":
        return [i * L for i in range(n // L)]
    if rule == "peak":
        mag = np.sqrt((acc[:, :n] ** 2).sum(axis=0))
        p = int(np.argmax(mag))
        start = p - L // 2
        start = max(0, min(start, n - L))  # shift inward at boundaries
        return [max(0, start)]
    return [0]  # "first" and "stairs"


def segment_recording(
    acc: SensorRecording, gyr: SensorRecording, scheme: LabelingScheme
) -> list[SegmentVector]:
    """Cut one acc/gyr recording pair into labeled window vectors."""
    if acc.kind is not SensorKind.LINEAR_ACCELERATION or gyr.kind is not SensorKind.ANGULAR_SPEED:
        raise ValueError("expected (acceleration, angular_speed) recording pair")
    if (acc.subject_id, acc.position, acc.activity) != (
        gyr.subject_id,
        gyr.position,
        gyr.activity,
    ):
        raise ValueError("acc and gyr recordings describe different trials")

    L = acc.position.window_length
    n_acc, n_gyr = acc.n_samples, gyr.n_samples
    n = min(n_acc, n_gyr)
    if abs(n_acc - n_gyr) > 0.2 * max(n_acc, n_gyr):
        warnings.warn(
            f"{acc.sampling_id}: acc/gyr sample counts differ by more than 20% "
            f"({n_acc} vs {n_gyr}); using common prefix of {n}",
            ChannelMismatchWarning,
            stacklevel=2,
        )
    if 2 * n < L:
        warnings.warn(
            f"{acc.sampling_id}: {n} samples is shorter than half a window (L={L}); skipped",
            TooShortWarning,
            stacklevel=2,
        )
        return []

    acc_ch = acc.values[:n].T  # (3, n)
    gyr_ch = gyr.values[:n].T
    rule = _rule_for(acc.activity)
    label = label_for(acc.activity, scheme)

    vectors: list[SegmentVector] = []
    if rule == "tile" and n < L:
        return []  # no complete tile
    for start in _window_starts(n, L, rule, acc_ch):
        stop = min(start + L, n)
        vectors.append(
            SegmentVector(
                subject_id=acc.subject_id,
                position=acc.position,
                activity=acc.activity,
                label=label,
                acc_xyz=padding_policy(np.ascontiguousarray(acc_ch[:, start:stop]), L),
                gyr_xyz=padding_policy(np.ascontiguousarray(gyr_ch[:, start:stop]), L),
                sampling_id=acc.sampling_id,
                start_index=start,
                rule=rule,
            )
        )
    return vectors


def pair_recordings(
    recordings: list[SensorRecording],
) -> list[tuple[SensorRecording, SensorRecording]]:
    """Join recordings into (acc, gyr) pairs on (subject, position, sampling id)."""
    acc_by_key: dict[tuple, SensorRecording] = {}
    gyr_by_key: dict[tuple, SensorRecording] = {}
    order: list[tuple] = []
    for rec in recordings:
        key = (rec.subject_id, rec.position, rec.sampling_id)
        bucket = (
            acc_by_key if rec.kind is SensorKind.LINEAR_ACCELERATION else gyr_by_key
        )
        if key not in acc_by_key and key not in gyr_by_key:
            order.append(key)
        bucket[key] = rec
    pairs = []
    for key in order:
        if key in acc_by_key and key in gyr_by_key:
            pairs.append((acc_by_key[key], gyr_by_key[key]))
        else:
            warnings.warn(
                f"trial {key} lacks its counterpart sensor file; skipped",
                ChannelMismatchWarning,
                stacklevel=2,
            )
    return pairs


def segment_all(
    recordings: list[SensorRecording],
    scheme: LabelingScheme,
    position: BodyPosition | None = None,
) -> list[SegmentVector]:
    """Pair and segment a whole recording list, optionally for one position."""
    vectors: list[SegmentVector] = []
    for acc, gyr in pair_recordings(recordings):
        if position is not None and acc.position is not position:
            continue
        vectors.extend(segment_recording(acc, gyr, scheme))
    return vectors


def dump_segments(vectors: list[SegmentVector], out_dir: str | Path) -> Path:
    """Debug dump: one 6-column CSV per vector plus a manifest CSV."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest_path = out / "manifest.csv"
    with open(manifest_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["file", "subject", "position", "activity", "withRifle", "label", "sampling_id", "start_index"]
        )
        for i, v in enumerate(vectors):
            name = f"segment_{i:05d}.csv"
            writer.writerow(
                [
                    name,
                    v.subject_id,
                    v.position.value,
                    f"{v.activity.family}_{v.activity.index}",
                    int(v.activity.with_rifle),
                    v.label,
                    v.sampling_id,
                    v.start_index,
                ]
            )
            cols = np.vstack([v.acc_xyz, v.gyr_xyz]).T  # (L, 6)
            with open(out / name, "w", newline="", encoding="utf-8") as sf:
                seg_writer = csv.writer(sf)
                seg_writer.writerow(["acc_x", "acc_y", "acc_z", "gyr_x", "gyr_y", "gyr_z"])
                seg_writer.writerows(cols.tolist())
    return manifest_path
