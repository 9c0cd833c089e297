"""Seeded synthetic recordings with fall-like magnitude signatures.

Desk-scale stand-in for real collections.  Signals are built as a magnitude
envelope distributed over a slowly drifting 3-D direction, so the Euclidean
norm of the emitted x/y/z samples equals the envelope exactly.  Contracts:

* FALL trials: one impact peak in [70, 130] inside the first five seconds,
  a smaller bounce, then ground-rest magnitude near 10.
* ADL trials never exceed magnitude 40.
* Shooting-position transitions (OM3-OM8) carry a single interior magnitude
  peak between 45 and 66 so peak-centered windowing has a unique target.

The chest device samples faster than the watches by exactly 1025/450, which
keeps five-second windows sample-exact at every position.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .activities import ActivityCode, BodyPosition, SensorKind
from .ingest import SensorRecording

CHEST_RATE_FACTOR = 1025.0 / 450.0
GRAVITY = 9.81
REST_MAGNITUDE = 10.0
FALL_PEAK_LOW = 70.0
FALL_PEAK_HIGH = 130.0
ADL_MAGNITUDE_CAP = 40.0

_TRIAL_GAP_S = 5.0


class InvalidSpecError(ValueError):
    """Zero subjects or an empty activity list."""


@dataclass(frozen=True)
class SyntheticSpec:
    """What to generate: every subject performs every listed activity once.

    List an activity several times for repeated trials.  ``rate_hz`` is the
    watch rate; the chest device runs at ``rate_hz * 1025/450``.
    """

    subjects: int
    activities: Sequence[ActivityCode]
    rate_hz: float = 90.0
    seed: int = 0
    positions: Sequence[BodyPosition] = field(
        default=(BodyPosition.CHEST, BodyPosition.LEFT_WRIST, BodyPosition.RIGHT_WRIST)
    )


def position_rate(spec_rate_hz: float, position: BodyPosition) -> float:
    if position is BodyPosition.CHEST:
        return spec_rate_hz * CHEST_RATE_FACTOR
    return spec_rate_hz


def _unit_walk(rng: np.random.Generator, n: int, step: float = 0.05) -> np.ndarray:
    """Smooth random walk on the unit sphere, shape (n, 3)."""
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    steps = rng.normal(scale=step, size=(n, 3))
    out = np.empty((n, 3))
    for i in range(n):
        v = v + steps[i]
        v /= np.linalg.norm(v)
        out[i] = v
    return out


def _spike(t: np.ndarray, center_s: float, height: float, width_s: float) -> np.ndarray:
    return height * np.exp(-0.5 * ((t - center_s) / width_s) ** 2)


def _acc_envelope(
    activity: ActivityCode, t: np.ndarray, rng: np.random.Generator, onset_s: float
) -> np.ndarray:
    fam, idx = activity.family, activity.index
    noise = rng.normal(scale=0.3, size=t.size)

    if fam == "FALL":
        peak = rng.uniform(FALL_PEAK_LOW + 5.0, FALL_PEAK_HIGH - 5.0)
        m = np.full(t.size, GRAVITY) + noise
        settled = t >= onset_s + 1.2
        m[settled] = REST_MAGNITUDE + 0.3 * noise[settled]
        m += _spike(t, onset_s + 0.5, 0.55 * peak, 0.05)
        m += _spike(t, onset_s + 0.9, rng.uniform(38.0, 55.0), 0.04)
        # Everything but the impact sample stays clear of the peak band.
        m = np.clip(m, 1.0, 66.0)
        i_peak = int(np.argmin(np.abs(t - (onset_s + 0.5))))
        m[i_peak] = peak
        return m

    if fam == "OM" and idx in (3, 4, 5, 6, 7, 8):
        # Locomotion, one transition spike, then a steady hold.
        m = GRAVITY + 2.0 * np.sin(2 * np.pi * 1.8 * t + rng.uniform(0, 2 * np.pi)) + noise
        hold = t >= onset_s + 0.6
        m[hold] = GRAVITY + 0.4 * noise[hold]
        spike_height = rng.uniform(52.0, 62.0) if idx in (6, 7, 8) else rng.uniform(46.0, 56.0)
        m = np.clip(m, 1.0, 30.0)
        m += _spike(t, onset_s, spike_height, 0.06)
        # Unique interior global max at the transition sample.
        m = np.clip(m, 1.0, spike_height - 2.0)
        i_peak = int(np.argmin(np.abs(t - onset_s)))
        m[i_peak] = spike_height
        return m

    if fam == "OM" and idx == 9:  # crawl
        m = 12.0 + 3.0 * np.sin(2 * np.pi * 0.9 * t) + noise
        return np.clip(m, 1.0, 25.0)

    if fam == "OM":  # sweeps OM1/OM2: engagement walk
        m = GRAVITY + 1.6 * np.sin(2 * np.pi * 1.5 * t + rng.uniform(0, 2 * np.pi)) + noise
        return np.clip(m, 1.0, 20.0)

    # ADLs: all bounded well below the fall band.
    if idx == 1:  # standing
        m = GRAVITY + 0.4 * np.sin(2 * np.pi * 0.25 * t) + noise
        return np.clip(m, 6.0, 13.0)
    if idx in (3, 13, 14):  # running
        m = GRAVITY + 6.0 * np.abs(np.sin(2 * np.pi * 2.8 * t)) + 2.0 * noise
        return np.clip(m, 2.0, 28.0)
    if idx == 4:  # jumping every 2 s
        m = GRAVITY + noise
        for c in np.arange(1.0, t[-1], 2.0):
            m += _spike(t, c, 16.0, 0.08)
        return np.clip(m, 2.0, 34.0)
    if idx in (7, 8):  # chair transitions: one mild interior hump
        m = GRAVITY + noise + _spike(t, onset_s, rng.uniform(10.0, 16.0), 0.3)
        return np.clip(m, 2.0, 30.0)
    # walking and stairs
    m = GRAVITY + 2.2 * np.sin(2 * np.pi * 1.8 * t + rng.uniform(0, 2 * np.pi)) + noise
    return np.clip(m, 2.0, 18.0)


def _gyr_envelope(
    activity: ActivityCode, t: np.ndarray, rng: np.random.Generator, onset_s: float
) -> np.ndarray:
    fam, idx = activity.family, activity.index
    noise = rng.normal(scale=0.1, size=t.size)

    if fam == "FALL":
        m = 0.4 + noise + _spike(t, onset_s + 0.5, rng.uniform(8.0, 14.0), 0.07)
        m[t >= onset_s + 1.2] = 0.15
        return np.clip(np.abs(m), 0.01, 20.0)
    if fam == "OM" and idx in (3, 4, 5, 6, 7, 8):
        m = 1.2 + 0.6 * np.sin(2 * np.pi * 1.8 * t) + noise
        m += _spike(t, onset_s, rng.uniform(4.0, 7.0), 0.08)
        return np.clip(np.abs(m), 0.01, 10.0)
    if fam == "OM":  # sweeps and crawl
        m = 1.0 + 0.5 * np.sin(2 * np.pi * 1.2 * t) + noise
        return np.clip(np.abs(m), 0.01, 5.0)
    if idx == 1:
        return np.clip(np.abs(0.3 + noise), 0.01, 2.0)
    m = 1.5 + 0.8 * np.sin(2 * np.pi * 1.8 * t + rng.uniform(0, 2 * np.pi)) + noise
    return np.clip(np.abs(m), 0.01, 6.0)


def _default_onset(activity: ActivityCode, rng: np.random.Generator) -> float:
    if activity.family == "FALL":
        return rng.uniform(0.8, 3.0)  # impact and bounce inside the first 5 s
    if activity.family == "OM" and activity.index in (3, 4, 5, 6, 7, 8):
        lo = 1.0
        hi = max(lo + 0.5, activity.duration_s - 1.5)
        return rng.uniform(lo, hi)
    if activity.family == "ADL" and activity.index in (7, 8):
        return rng.uniform(1.5, 3.0)
    return 0.0


def synth_recording_pair(
    subject_id: int,
    activity: ActivityCode,
    position: BodyPosition,
    rate_hz: float,
    seed_seq: np.random.SeedSequence,
    sampling_id: str,
    start_ts: int = 0,
    onset_s: float | None = None,
    duration_s: float | None = None,
) -> tuple[SensorRecording, SensorRecording]:
    """One synthetic trial: the (acceleration, angular-speed) recording pair.

    ``onset_s`` pins the impact/transition time (seconds into the trial);
    by default it is drawn per trial.  Pass the raw watch-rate via
    ``rate_hz``; callers wanting the chest rate scale it themselves (see
    :func:`position_rate`).
    """
    duration = activity.duration_s if duration_s is None else duration_s
    n = int(np.floor(duration * rate_hz))
    if n < 2:
        raise InvalidSpecError(f"rate {rate_hz} Hz gives {n} samples for {activity.name}")
    rng_onset, rng_acc, rng_gyr, rng_dir_a, rng_dir_g = (
        np.random.default_rng(s) for s in seed_seq.spawn(5)
    )
    t = np.arange(n) / rate_hz
    onset = _default_onset(activity, rng_onset) if onset_s is None else onset_s

    acc_mag = _acc_envelope(activity, t, rng_acc, onset)
    gyr_mag = _gyr_envelope(activity, t, rng_gyr, onset)
    acc_xyz = acc_mag[:, None] * _unit_walk(rng_dir_a, n)
    gyr_xyz = gyr_mag[:, None] * _unit_walk(rng_dir_g, n)

    timestamps = start_ts + np.round(t * 1000.0).astype(np.int64)
    end_ts = start_ts + int(round(duration * 1000.0))

    def _make(kind: SensorKind, values: np.ndarray) -> SensorRecording:
        return SensorRecording(
            sampling_id=sampling_id,
            subject_id=subject_id,
            position=position,
            kind=kind,
            activity=activity,
            start_ts=start_ts,
            end_ts=end_ts,
            timestamps=timestamps,
            values=values,
        )

    return (
        _make(SensorKind.LINEAR_ACCELERATION, acc_xyz),
        _make(SensorKind.ANGULAR_SPEED, gyr_xyz),
    )


def generate_synthetic(spec: SyntheticSpec) -> list[SensorRecording]:
    """Deterministically generate recordings for every subject/activity/position.

    The same spec (including seed) always yields identical samples.  Raises
    :class:`InvalidSpecError` for zero subjects or an empty activity list.
    """
    if spec.subjects <= 0 or not spec.activities:
        raise InvalidSpecError("need at least one subject and one activity")
    if spec.rate_hz <= 0:
        raise InvalidSpecError("rate_hz must be positive")

    recordings: list[SensorRecording] = []
    for subject in range(1, spec.subjects + 1):
        for p_idx, position in enumerate(spec.positions):
            rate = position_rate(spec.rate_hz, position)
            offset_ms = 0
            for a_idx, activity in enumerate(spec.activities):
                seq = np.random.SeedSequence(
                    entropy=spec.seed, spawn_key=(subject, p_idx, a_idx)
                )
                acc, gyr = synth_recording_pair(
                    subject_id=subject,
                    activity=activity,
                    position=position,
                    rate_hz=rate,
                    seed_seq=seq,
                    sampling_id=str(a_idx + 1),
                    start_ts=offset_ms,
                )
                recordings.extend((acc, gyr))
                offset_ms = acc.end_ts + int(_TRIAL_GAP_S * 1000)
    return recordings
