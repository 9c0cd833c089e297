"""Assembling window vectors into per-pipeline training datasets.

A pipeline is (scenario, domain, labeling scheme, body position).  Scenarios
choose the channel stack; the frequency domain replaces each channel with the
magnitude of its Fourier transform with the zero-frequency bin removed, which
halves the channel length.  Datasets are split 60/20/20 (train/val/test),
stratified by label, and standardized per channel with statistics fitted on
the training split only.
"""

from __future__ import annotations

import enum
import io
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .activities import ActivityCode, BodyPosition, LabelingScheme
from .segment import SegmentVector


class Scenario(enum.Enum):
    """Which sensor channels feed the model."""

    SC1_ACC = "Sc1Acc"  # |acc|
    SC1_GYR = "Sc1Gyr"  # |gyr|
    SC2_ACC = "Sc2Acc"  # acc x, y, z
    SC2_GYR = "Sc2Gyr"  # gyr x, y, z
    SC3 = "Sc3"  # |acc|, |gyr|
    SC4 = "Sc4"  # acc x, y, z, gyr x, y, z

    @property
    def channel_count(self) -> int:
        return {
            Scenario.SC1_ACC: 1,
            Scenario.SC1_GYR: 1,
            Scenario.SC2_ACC: 3,
            Scenario.SC2_GYR: 3,
            Scenario.SC3: 2,
            Scenario.SC4: 6,
        }[self]


class FeatureDomain(enum.Enum):
    TIME = "T"
    FREQUENCY = "F"


class HeterogeneousLengthError(ValueError):
    """Segments passed to assemble() disagree on window length."""


class DegenerateClassWarning(UserWarning):
    """Stratified split impossible (a split would hold zero positives)."""


@dataclass(frozen=True)
class PipelineId:
    """Names one experimental pipeline, e.g. chest/Sc4T/l2."""

    scenario: Scenario
    domain: FeatureDomain
    scheme: LabelingScheme
    position: BodyPosition

    @property
    def short_name(self) -> str:
        return f"{self.scenario.value}{self.domain.value}"

    @property
    def name(self) -> str:
        return f"{self.position.value}_{self.short_name}_{self.scheme.value}"

    @property
    def feature_length(self) -> int:
        L = self.position.window_length
        return L if self.domain is FeatureDomain.TIME else L // 2

    @property
    def channel_count(self) -> int:
        return self.scenario.channel_count


def magnitude(x, y, z):
    """Euclidean norm of the three axis components (elementwise over arrays)."""
    x, y, z = np.asarray(x), np.asarray(y), np.asarray(z)
    return np.sqrt(x * x + y * y + z * z)


def spectrum(series: np.ndarray) -> np.ndarray:
    """DFT magnitudes at bins 1..floor(L/2); the DC bin is removed.

    Output length is floor(L/2) (225 for L=450, 512 for L=1025), so constant
    inputs map to all zeros.  Energy bookkeeping: with x zero-mean,
    sum(|X_k|^2) over the returned one-sided bins, doubled except at the
    Nyquist bin of an even-length input, equals L * sum(x^2) (Parseval with
    numpy's unnormalized DFT convention).  Operates on the last axis.
    """
    series = np.asarray(series)
    L = series.shape[-1]
    if L < 2:
        raise ValueError(f"spectrum needs a series of length >= 2, got {L}")
    return np.abs(np.fft.rfft(series, axis=-1))[..., 1 : L // 2 + 1]


@dataclass(frozen=True)
class Example:
    """One model input: channel matrix, binary label, and trial provenance."""

    channels: np.ndarray  # (C, D)
    label: int
    provenance: tuple  # (subject_id, activity name, with_rifle)


def window_channels(
    acc_xyz: np.ndarray, gyr_xyz: np.ndarray, scenario: Scenario, domain: FeatureDomain
) -> np.ndarray:
    """Channel-stack one raw window; shared by dataset assembly and streaming."""
    if scenario is Scenario.SC1_ACC:
        channels = magnitude(*acc_xyz)[None, :]
    elif scenario is Scenario.SC1_GYR:
        channels = magnitude(*gyr_xyz)[None, :]
    elif scenario is Scenario.SC2_ACC:
        channels = np.asarray(acc_xyz)
    elif scenario is Scenario.SC2_GYR:
        channels = np.asarray(gyr_xyz)
    elif scenario is Scenario.SC3:
        channels = np.stack([magnitude(*acc_xyz), magnitude(*gyr_xyz)])
    else:
        channels = np.vstack([acc_xyz, gyr_xyz])
    if domain is FeatureDomain.FREQUENCY:
        channels = spectrum(channels)
    return channels


def assemble(
    segments: Sequence[SegmentVector], scenario: Scenario, domain: FeatureDomain
) -> list[Example]:
    """Build model inputs for one scenario/domain from labeled windows."""
    if not segments:
        return []
    lengths = {v.length for v in segments}
    if len(lengths) != 1:
        raise HeterogeneousLengthError(f"mixed window lengths {sorted(lengths)}")
    examples = []
    for v in segments:
        channels = window_channels(v.acc_xyz, v.gyr_xyz, scenario, domain)
        examples.append(
            Example(
                channels=channels,
                label=v.label,
                provenance=(v.subject_id, v.activity.name, v.activity.with_rifle),
            )
        )
    return examples


@dataclass
class SplitArrays:
    x: np.ndarray  # (n, C, D)
    y: np.ndarray  # (n,) of {0,1}
    provenance: list[tuple]

    def __len__(self) -> int:
        return int(self.y.size)


@dataclass
class ScenarioDataset:
    """Channel-stacked examples for one pipeline with a 60/20/20 split.

    Splits are standardized using per-channel mean/std fitted on train.  The
    test split is guarded behind a property that counts accesses, so training
    code can prove it never touched test examples before the final phase.
    """

    pipeline: PipelineId
    train: SplitArrays
    val: SplitArrays
    norm_mean: np.ndarray  # (C,)
    norm_std: np.ndarray  # (C,)
    _test: SplitArrays = field(repr=False, default=None)  # type: ignore[assignment]
    test_access_count: int = 0

    @property
    def test(self) -> SplitArrays:
        self.test_access_count += 1
        return self._test

    @property
    def n_channels(self) -> int:
        return int(self.train.x.shape[1])

    @property
    def length(self) -> int:
        return int(self.train.x.shape[2])

    def normalize(self, channels: np.ndarray) -> np.ndarray:
        """Apply the train-fitted standardization to a (..., C, D) array."""
        return (channels - self.norm_mean[..., :, None]) / self.norm_std[..., :, None]


def _allocate(counts: int) -> tuple[int, int, int]:
    """Largest-remainder 60/20/20 allocation of one class."""
    exact = np.array([0.6, 0.2, 0.2]) * counts
    base = np.floor(exact).astype(int)
    rem = counts - base.sum()
    order = np.argsort(-(exact - base), kind="stable")
    for i in range(rem):
        base[order[i]] += 1
    return int(base[0]), int(base[1]), int(base[2])


def split(
    examples: Sequence[Example],
    seed: int,
    pipeline: PipelineId | None = None,
    by_subject: bool = False,
) -> ScenarioDataset:
    """Shuffled stratified 60/20/20 split with train-fitted standardization.

    Deterministic under ``seed``.  Falls back to a non-stratified split with a
    :class:`DegenerateClassWarning` when some split would receive zero
    positive examples.  ``by_subject`` switches to subject-level splitting for
    leakage studies (proportions then hold only approximately).
    """
    if len(examples) < 5:
        raise ValueError(f"need at least 5 examples to split, got {len(examples)}")
    x = np.stack([e.channels for e in examples]).astype(np.float64)
    y = np.array([e.label for e in examples], dtype=np.int64)
    prov = [e.provenance for e in examples]
    rng = np.random.default_rng(seed)

    if by_subject:
        idx_parts = _split_by_subject(prov, rng)
    else:
        n_pos = int(y.sum())
        pos_alloc = _allocate(n_pos)
        if n_pos > 0 and min(pos_alloc) == 0:
            warnings.warn(
                f"only {n_pos} positive examples; falling back to a non-stratified split",
                DegenerateClassWarning,
                stacklevel=2,
            )
            perm = rng.permutation(len(examples))
            n_train, n_val, _ = _allocate(len(examples))
            idx_parts = (
                perm[:n_train],
                perm[n_train : n_train + n_val],
                perm[n_train + n_val :],
            )
        else:
            parts = [[], [], []]
            for cls in (0, 1):
                cls_idx = rng.permutation(np.flatnonzero(y == cls))
                n_train, n_val, _ = _allocate(cls_idx.size)
                parts[0].append(cls_idx[:n_train])
                parts[1].append(cls_idx[n_train : n_train + n_val])
                parts[2].append(cls_idx[n_train + n_val :])
            idx_parts = tuple(
                rng.permutation(np.concatenate(p)) if p else np.array([], dtype=int)
                for p in parts
            )

    train_idx, val_idx, test_idx = idx_parts
    mean = x[train_idx].mean(axis=(0, 2))
    std = x[train_idx].std(axis=(0, 2))
    std = np.where(std < 1e-12, 1.0, std)

    def _norm_split(idx: np.ndarray) -> SplitArrays:
        xs = (x[idx] - mean[:, None]) / std[:, None]
        return SplitArrays(x=xs, y=y[idx], provenance=[prov[i] for i in idx])

    return ScenarioDataset(
        pipeline=pipeline,
        train=_norm_split(train_idx),
        val=_norm_split(val_idx),
        norm_mean=mean,
        norm_std=std,
        _test=_norm_split(test_idx),
    )


def _split_by_subject(prov: list[tuple], rng: np.random.Generator):
    subjects = sorted({p[0] for p in prov})
    order = rng.permutation(len(subjects))
    shuffled = [subjects[i] for i in order]
    n_train, n_val, _ = _allocate(len(shuffled))
    train_s = set(shuffled[:n_train])
    val_s = set(shuffled[n_train : n_train + n_val])
    parts = ([], [], [])
    for i, p in enumerate(prov):
        if p[0] in train_s:
            parts[0].append(i)
        elif p[0] in val_s:
            parts[1].append(i)
        else:
            parts[2].append(i)
    return tuple(np.array(p, dtype=int) for p in parts)


def build_dataset(
    segments: Sequence[SegmentVector],
    scenario: Scenario,
    domain: FeatureDomain,
    scheme: LabelingScheme,
    position: BodyPosition,
    seed: int,
    by_subject: bool = False,
) -> ScenarioDataset:
    """assemble + split for one pipeline."""
    pipeline = PipelineId(scenario, domain, scheme, position)
    examples = assemble(segments, scenario, domain)
    return split(examples, seed=seed, pipeline=pipeline, by_subject=by_subject)


# ---------------------------------------------------------------------------
# Serialization: one binary container per pipeline, plus a CSV export.
# ---------------------------------------------------------------------------

_FORMAT_VERSION = 1


def save_dataset(dataset: ScenarioDataset, path: str | Path) -> None:
    """Write a dataset to a single .npz container with a JSON header."""
    p = dataset.pipeline
    header = {
        "version": _FORMAT_VERSION,
        "scenario": p.scenario.value,
        "domain": p.domain.value,
        "scheme": p.scheme.value,
        "position": p.position.value,
        "channels": dataset.n_channels,
        "length": dataset.length,
        "counts": [len(dataset.train), len(dataset.val), len(dataset._test)],
    }
    arrays = {
        "header": np.frombuffer(json.dumps(header).encode(), dtype=np.uint8),
        "norm_mean": dataset.norm_mean,
        "norm_std": dataset.norm_std,
    }
    for name, part in (("train", dataset.train), ("val", dataset.val), ("test", dataset._test)):
        arrays[f"{name}_x"] = part.x
        arrays[f"{name}_y"] = part.y
        arrays[f"{name}_prov"] = np.frombuffer(
            json.dumps(part.provenance).encode(), dtype=np.uint8
        )
    with open(path, "wb") as fh:
        np.savez_compressed(fh, **arrays)


def load_dataset_file(path: str | Path) -> ScenarioDataset:
    with np.load(path) as data:
        header = json.loads(bytes(data["header"]).decode())
        if header["version"] != _FORMAT_VERSION:
            raise ValueError(f"unsupported dataset version {header['version']}")
        pipeline = PipelineId(
            scenario=Scenario(header["scenario"]),
            domain=FeatureDomain(header["domain"]),
            scheme=LabelingScheme(header["scheme"]),
            position=BodyPosition(header["position"]),
        )

        def _part(name: str) -> SplitArrays:
            prov = [tuple(p) for p in json.loads(bytes(data[f"{name}_prov"]).decode())]
            return SplitArrays(x=data[f"{name}_x"], y=data[f"{name}_y"], provenance=prov)

        return ScenarioDataset(
            pipeline=pipeline,
            train=_part("train"),
            val=_part("val"),
            norm_mean=data["norm_mean"],
            norm_std=data["norm_std"],
            _test=_part("test"),
        )


def export_csv(dataset: ScenarioDataset, path: str | Path) -> None:
    """Flat CSV for inspection: split, label, provenance, then C*D feature columns."""
    buf = io.StringIO()
    c, d = dataset.n_channels, dataset.length
    cols = ",".join(f"c{ci}_t{ti}" for ci in range(c) for ti in range(d))
    buf.write(f"split,label,subject,activity,withRifle,{cols}\n")
    for name, part in (("train", dataset.train), ("val", dataset.val), ("test", dataset._test)):
        flat = part.x.reshape(len(part), -1)
        for i in range(len(part)):
            subject, act, rifle = part.provenance[i]
            row = ",".join(repr(float(v)) for v in flat[i])
            buf.write(f"{name},{int(part.y[i])},{subject},{act},{int(rifle)},{row}\n")
    Path(path).write_text(buf.getvalue(), encoding="utf-8")
