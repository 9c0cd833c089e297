"""Real-time sliding-window fall detection over a 6-channel sample feed.

Five-second windows advance in one-second steps; each completed window's most
recent samples (padded when short) are feature-assembled for the model's
pipeline, normalized with the training statistics, and classified.  A fall
starting at second 2 spans [2, 7), so the window [2, 7) is the first to hold
the complete pattern and detection fires at its end: a 5-second latency.

Feed rows are ``(timestamp_ms, ax, ay, az, gx, gy, gz)``; any iterable works,
including a generator over live samples.  Overlapping windows re-detect the
same incident, so consumers usually merge events with :func:`merge_events`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .features import window_channels
from .ingest import SensorKind, SensorRecording
from .model import ShapeMismatchError
from .segment import padding_policy


class FeedGapWarning(UserWarning):
    """A window elapsed with no (or too few) samples and was skipped."""


class NoGroundTruthError(ValueError):
    """Stream evaluation requires fall-onset annotations."""


@dataclass(frozen=True)
class WindowConfig:
    window_seconds: float = 5.0
    step_seconds: float = 1.0
    samples_per_window: int = 450

    def __post_init__(self) -> None:
        if not 0 < self.step_seconds < self.window_seconds:
            raise ValueError("need 0 < step < window")
        if self.samples_per_window < 2:
            raise ValueError("samples_per_window must be at least 2")


@dataclass(frozen=True)
class DetectionEvent:
    window_start_s: float
    window_end_s: float
    probability: float
    detected_at_s: float
    latency_s: float | None = None

    def as_record(self) -> dict:
        return {
            "window_start_s": self.window_start_s,
            "window_end_s": self.window_end_s,
            "probability": round(self.probability, 6),
            "detected_at_s": self.detected_at_s,
            "latency_s": self.latency_s,
        }


@dataclass(frozen=True)
class Incident:
    """Consecutive positive windows merged into one detection."""

    first_event: DetectionEvent
    last_event: DetectionEvent
    n_windows: int

    @property
    def detected_at_s(self) -> float:
        return self.first_event.detected_at_s


@dataclass
class StreamReport:
    n_falls: int
    n_detected: int
    latencies_s: list[float | None]
    false_alarms: int
    false_alarm_rate_per_hour: float
    n_windows: int
    duration_s: float
    events: list[DetectionEvent] = field(default_factory=list)


def _classify_window(model, acc: np.ndarray, gyr: np.ndarray) -> float:
    if model.pipeline is None:
        raise ValueError("model carries no pipeline id; cannot assemble features")
    channels = window_channels(acc, gyr, model.pipeline.scenario, model.pipeline.domain)
    if model.norm_mean is not None:
        channels = (channels - model.norm_mean[:, None]) / model.norm_std[:, None]
    return float(model.predict_proba(channels))


def _window_vector(rows: np.ndarray, n_samples: int) -> tuple[np.ndarray, np.ndarray] | None:
    """Most recent n_samples rows as ((3, L) acc, (3, L) gyr); None when too sparse."""
    if rows.shape[0] == 0 or 2 * rows.shape[0] < n_samples:
        return None
    tail = rows[-n_samples:]
    acc = padding_policy(np.ascontiguousarray(tail[:, 1:4].T), n_samples)
    gyr = padding_policy(np.ascontiguousarray(tail[:, 4:7].T), n_samples)
    return acc, gyr


def iter_windows(
    samples: Iterable[Sequence[float]], cfg: WindowConfig
) -> Iterator[tuple[int, float, float, np.ndarray]]:
    """Yield (index, start_s, end_s, rows) for each fully elapsed window.

    Works incrementally: a window is emitted as soon as a sample at or past
    its end time arrives, holding only the rows still inside open windows.
    Start times are relative to the first sample's timestamp.
    """
    window_ms = round(cfg.window_seconds * 1000)
    step_ms = round(cfg.step_seconds * 1000)
    buffer: list[tuple] = []
    t0: int | None = None
    k = 0

    def _emit(k: int) -> tuple[int, float, float, np.ndarray]:
        start, end = t0 + k * step_ms, t0 + k * step_ms + window_ms
        rows = np.array([r for r in buffer if start <= r[0] < end], dtype=np.float64)
        return k, k * cfg.step_seconds, k * cfg.step_seconds + cfg.window_seconds, rows

    for row in samples:
        ts = int(row[0])
        if t0 is None:
            t0 = ts
        # A window is complete once a sample at or past its end arrives.
        while ts >= t0 + k * step_ms + window_ms:
            yield _emit(k)
            k += 1
            cutoff = t0 + k * step_ms
            buffer = [r for r in buffer if r[0] >= cutoff]
        buffer.append(tuple(float(v) for v in row))


def stream_detect(
    samples: Iterable[Sequence[float]] | np.ndarray,
    model,
    cfg: WindowConfig,
) -> list[DetectionEvent]:
    """Classify every window of a feed; one event per positive window.

    ``model`` needs ``predict_proba``, ``decision_threshold``, ``pipeline``
    and (optionally) normalization stats, which trained checkpoints carry.
    Windows without enough samples to honor the padding contract are skipped
    with a :class:`FeedGapWarning`.
    """
    events: list[DetectionEvent] = []
    for _, start_s, end_s, rows in iter_windows(samples, cfg):
        vec = _window_vector(rows, cfg.samples_per_window)
        if vec is None:
            warnings.warn(
                f"window [{start_s:g}, {end_s:g}) has {rows.shape[0]} samples; skipped",
                FeedGapWarning,
                stacklevel=2,
            )
            continue
        probability = _classify_window(model, *vec)
        if probability >= model.decision_threshold:
            events.append(
                DetectionEvent(
                    window_start_s=start_s,
                    window_end_s=end_s,
                    probability=probability,
                    detected_at_s=end_s,
                )
            )
    return events


def count_windows(samples: np.ndarray, cfg: WindowConfig) -> int:
    """Number of fully elapsed windows in a feed array."""
    if len(samples) == 0:
        return 0
    duration_ms = int(samples[-1][0]) - int(samples[0][0])
    span = duration_ms - round(cfg.window_seconds * 1000)
    if span < 0:
        return 0
    return span // round(cfg.step_seconds * 1000) + 1


def merge_events(events: Sequence[DetectionEvent], merge_gap_s: float = 5.0) -> list[Incident]:
    """Merge bursts of positive windows into incidents, keeping first-detection times."""
    incidents: list[Incident] = []
    run: list[DetectionEvent] = []
    for event in events:
        if run and event.detected_at_s - run[-1].detected_at_s > merge_gap_s:
            incidents.append(Incident(run[0], run[-1], len(run)))
            run = []
        run.append(event)
    if run:
        incidents.append(Incident(run[0], run[-1], len(run)))
    return incidents


def recordings_to_stream(acc: SensorRecording, gyr: SensorRecording) -> np.ndarray:
    """Merge an acc/gyr recording pair into a (n, 7) feed array by sample index."""
    if acc.kind is not SensorKind.LINEAR_ACCELERATION or gyr.kind is not SensorKind.ANGULAR_SPEED:
        raise ValueError("expected an (acceleration, angular_speed) pair")
    n = min(acc.n_samples, gyr.n_samples)
    out = np.empty((n, 7), dtype=np.float64)
    out[:, 0] = acc.timestamps[:n]
    out[:, 1:4] = acc.values[:n]
    out[:, 4:7] = gyr.values[:n]
    return out


@dataclass(frozen=True)
class ReplayTrace:
    """A feed plus its ground-truth fall onsets (seconds from feed start)."""

    samples: np.ndarray  # (n, 7)
    fall_onsets_s: Sequence[float] | None = None


def evaluate_stream(
    traces: Sequence[ReplayTrace], model, cfg: WindowConfig
) -> StreamReport:
    """Replay annotated feeds and report detection coverage and false alarms.

    A fall counts as detected when any event window overlaps
    [onset, onset + window_seconds]; events overlapping no fall are false
    alarms.  Raises :class:`NoGroundTruthError` when a trace lacks its
    annotation list.
    """
    if any(t.fall_onsets_s is None for t in traces):
        raise NoGroundTruthError("every trace needs fall_onsets_s (possibly empty)")

    latencies: list[float | None] = []
    n_detected = 0
    false_alarms = 0
    all_events: list[DetectionEvent] = []
    n_windows = 0
    total_duration_s = 0.0

    for trace in traces:
        events = stream_detect(trace.samples, model, cfg)
        n_windows += count_windows(trace.samples, cfg)
        if len(trace.samples):
            total_duration_s += (trace.samples[-1][0] - trace.samples[0][0]) / 1000.0
        fall_span = cfg.window_seconds
        for onset in trace.fall_onsets_s:
            hits = [
                e
                for e in events
                if e.window_start_s < onset + fall_span and e.window_end_s > onset
            ]
            if hits:
                n_detected += 1
                latencies.append(hits[0].detected_at_s - onset)
            else:
                latencies.append(None)
        for event in events:
            overlaps = any(
                event.window_start_s < onset + fall_span and event.window_end_s > onset
                for onset in trace.fall_onsets_s
            )
            if not overlaps:
                false_alarms += 1
        all_events.extend(events)

    rate = false_alarms / (total_duration_s / 3600.0) if total_duration_s > 0 else 0.0
    return StreamReport(
        n_falls=sum(len(t.fall_onsets_s) for t in traces),
        n_detected=n_detected,
        latencies_s=latencies,
        false_alarms=false_alarms,
        false_alarm_rate_per_hour=rate,
        n_windows=n_windows,
        duration_s=total_duration_s,
        events=all_events,
    )
