"""Bayesian hyperparameter search maximizing validation MCC.

Protocol: a fixed number of sequential trials (default 20) proposes
configurations, each trained on the train split and scored by MCC on the
validation split; the best trial's configuration is then retrained 20 times
with fresh seeds and each retraining is evaluated once on the held-out test
split.  The test split is never read before the retraining phase, which the
dataset's access counter makes checkable.

The proposal strategy is a tree-structured-Parzen-estimator flavor: the first
five trials are random; afterwards the observed trials are split into the
top quartile ("good") and the rest, candidates are drawn from the good-side
density and ranked by the good/bad density ratio.  Feature-map and
dense-neuron counts are treated on a log scale; the small integer and grid
hyperparameters use smoothed categorical counts.  Failed trials keep a -1
objective so the sampler learns to avoid infeasible regions.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .features import ScenarioDataset
from .metrics import EvalReport
from .model import (
    Cnn1dConfig,
    DEFAULT_BATCH,
    DEFAULT_EPOCHS,
    DEFAULT_PATIENCE,
    DROPOUT_GRID,
    LEARNING_RATES,
    NonFiniteLossError,
    ShapeUnderflowError,
    THRESHOLD_GRID,
    build,
    evaluate,
    train,
    validation_mcc,
)

N_STARTUP_TRIALS = 5
N_CANDIDATES = 24
GOOD_FRACTION = 0.25
_KDE_WEIGHT = 0.8  # remainder is a uniform prior over the range


class AllTrialsFailedError(RuntimeError):
    """Every trial in the study failed to train."""


class TestAccessViolation(RuntimeError):
    """The test split was read before best-trial selection."""


@dataclass(frozen=True)
class SearchSpace:
    """Per-hyperparameter domains; defaults are the published search ranges."""

    feature_maps: tuple[int, int] = (8, 600)  # log-uniform integer
    kernel_size: tuple[int, int] = (2, 6)
    conv_layers: tuple[int, int] = (2, 4)
    dense_layers: tuple[int, int] = (1, 3)
    dense_neurons: tuple[int, int] = (60, 320)  # log-uniform integer
    dropout: tuple[float, ...] = DROPOUT_GRID
    learning_rate: tuple[float, ...] = LEARNING_RATES
    decision_threshold: tuple[float, ...] = THRESHOLD_GRID

    def sample(self, rng: np.random.Generator) -> Cnn1dConfig:
        """Uniform cold-start draw (log-scale for the two log dimensions)."""
        return Cnn1dConfig(
            feature_maps=_log_int_draw(rng, self.feature_maps),
            kernel_size=int(rng.integers(self.kernel_size[0], self.kernel_size[1] + 1)),
            conv_layers=int(rng.integers(self.conv_layers[0], self.conv_layers[1] + 1)),
            dense_layers=int(rng.integers(self.dense_layers[0], self.dense_layers[1] + 1)),
            dense_neurons=_log_int_draw(rng, self.dense_neurons),
            dropout=float(rng.choice(self.dropout)),
            learning_rate=float(rng.choice(self.learning_rate)),
            decision_threshold=float(rng.choice(self.decision_threshold)),
        )


@dataclass(frozen=True)
class Trial:
    index: int
    config: Cnn1dConfig
    objective: float
    status: str  # "complete" | "failed"
    duration_s: float = 0.0

    def as_record(self) -> dict:
        return {
            "index": self.index,
            "config": self.config.as_dict(),
            "objective": self.objective,
            "status": self.status,
            "duration_s": round(self.duration_s, 3),
        }


@dataclass
class StudyResult:
    trials: list[Trial]
    best: Trial
    retrain_reports: list[EvalReport]
    best_model: object = None  # retrained TrainedModel with the highest test MCC

    @property
    def best_retrain(self) -> EvalReport:
        return max(self.retrain_reports, key=lambda r: r.mcc)

    @property
    def retrain_mcc_mean(self) -> float:
        return float(np.mean([r.mcc for r in self.retrain_reports]))

    @property
    def retrain_mcc_std(self) -> float:
        return float(np.std([r.mcc for r in self.retrain_reports]))


def _log_int_draw(rng: np.random.Generator, bounds: tuple[int, int]) -> int:
    lo, hi = math.log(bounds[0]), math.log(bounds[1])
    return int(np.clip(round(math.exp(rng.uniform(lo, hi))), bounds[0], bounds[1]))


class _LogIntDim:
    def __init__(self, bounds: tuple[int, int]):
        self.bounds = bounds
        self.lo, self.hi = math.log(bounds[0]), math.log(bounds[1])
        self.range = self.hi - self.lo
        self.sigma = 0.15 * self.range

    def draw(self, rng: np.random.Generator, observed: list[int]) -> int:
        center = math.log(observed[int(rng.integers(len(observed)))])
        value = np.clip(rng.normal(center, self.sigma), self.lo, self.hi)
        return int(np.clip(round(math.exp(value)), *self.bounds))

    def log_density(self, value: int, observed: list[int]) -> float:
        x = math.log(value)
        centers = np.log(observed)
        pdf = np.exp(-0.5 * ((x - centers) / self.sigma) ** 2) / (
            self.sigma * math.sqrt(2 * math.pi)
        )
        p = _KDE_WEIGHT * float(pdf.mean()) + (1 - _KDE_WEIGHT) / self.range
        return math.log(p)


class _CategoricalDim:
    def __init__(self, values: Sequence):
        self.values = list(values)

    def _weights(self, observed: list) -> np.ndarray:
        counts = np.array(
            [1.0 + sum(1 for o in observed if _cat_eq(o, v)) for v in self.values]
        )
        return counts / counts.sum()

    def draw(self, rng: np.random.Generator, observed: list):
        w = self._weights(observed)
        return self.values[int(rng.choice(len(self.values), p=w))]

    def log_density(self, value, observed: list) -> float:
        w = self._weights(observed)
        for i, v in enumerate(self.values):
            if _cat_eq(value, v):
                return math.log(w[i])
        raise ValueError(f"{value!r} not in categorical domain {self.values}")


def _cat_eq(a, b) -> bool:
    return math.isclose(float(a), float(b), rel_tol=0.0, abs_tol=1e-9)


def _dims(space: SearchSpace) -> dict[str, object]:
    return {
        "feature_maps": _LogIntDim(space.feature_maps),
        "kernel_size": _CategoricalDim(range(space.kernel_size[0], space.kernel_size[1] + 1)),
        "conv_layers": _CategoricalDim(range(space.conv_layers[0], space.conv_layers[1] + 1)),
        "dense_layers": _CategoricalDim(range(space.dense_layers[0], space.dense_layers[1] + 1)),
        "dense_neurons": _LogIntDim(space.dense_neurons),
        "dropout": _CategoricalDim(space.dropout),
        "learning_rate": _CategoricalDim(space.learning_rate),
        "decision_threshold": _CategoricalDim(space.decision_threshold),
    }


def suggest(history: Sequence[Trial], space: SearchSpace, seed: int) -> Cnn1dConfig:
    """Propose the next configuration; deterministic under (seed, history)."""
    rng = np.random.default_rng([seed, len(history)])
    if len(history) < N_STARTUP_TRIALS:
        return space.sample(rng)

    ranked = sorted(history, key=lambda t: (-t.objective, t.index))
    n_good = max(1, math.ceil(GOOD_FRACTION * len(history)))
    good = [t.config.as_dict() for t in ranked[:n_good]]
    bad = [t.config.as_dict() for t in ranked[n_good:]]
    dims = _dims(space)

    best_score, best_cfg = -np.inf, None
    for _ in range(N_CANDIDATES):
        values = {name: dim.draw(rng, [g[name] for g in good]) for name, dim in dims.items()}
        score = sum(
            dim.log_density(values[name], [g[name] for g in good])
            - dim.log_density(values[name], [b[name] for b in bad])
            for name, dim in dims.items()
        )
        if score > best_score:
            best_score = score
            best_cfg = values
    return Cnn1dConfig(
        feature_maps=int(best_cfg["feature_maps"]),
        kernel_size=int(best_cfg["kernel_size"]),
        conv_layers=int(best_cfg["conv_layers"]),
        dense_layers=int(best_cfg["dense_layers"]),
        dense_neurons=int(best_cfg["dense_neurons"]),
        dropout=float(best_cfg["dropout"]),
        learning_rate=float(best_cfg["learning_rate"]),
        decision_threshold=float(best_cfg["decision_threshold"]),
    )


def _trial_seed(seed: int, index: int, phase: int = 0) -> int:
    return int(np.random.SeedSequence(entropy=seed, spawn_key=(phase, index)).generate_state(1)[0])


def _load_log(log_path: Path) -> list[Trial]:
    trials = []
    with open(log_path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            trials.append(
                Trial(
                    index=rec["index"],
                    config=Cnn1dConfig(**rec["config"]),
                    objective=rec["objective"],
                    status=rec["status"],
                    duration_s=rec.get("duration_s", 0.0),
                )
            )
    return trials


def run_study(
    dataset: ScenarioDataset,
    n_trials: int = 20,
    seed: int = 0,
    space: SearchSpace | None = None,
    epochs: int = DEFAULT_EPOCHS,
    batch: int = DEFAULT_BATCH,
    patience: int = DEFAULT_PATIENCE,
    retrainings: int = 20,
    retrain_epochs: int | None = None,
    log_path: str | Path | None = None,
) -> StudyResult:
    """Full search protocol: n sequential trials, then retrain the best.

    The objective of a trial is the restored best-epoch validation MCC; failed
    trials (shape underflow, divergence) score -1 and stay in the history.
    Equal-objective ties go to the cheapest trial: the deployment target is a
    watch, so between models with identical validation MCC the lighter one
    wins.  When ``log_path`` exists its trials are loaded first, so an
    interrupted study resumes where it stopped.
    """
    space = space or SearchSpace()
    if len(np.unique(dataset.train.y)) < 2 or len(np.unique(dataset.val.y)) < 2:
        raise ValueError("study needs both classes present in train and val splits")

    history: list[Trial] = []
    log_file = None
    if log_path is not None:
        log_path = Path(log_path)
        if log_path.exists():
            history = _load_log(log_path)[:n_trials]
        log_file = open(log_path, "a", encoding="utf-8")

    pipeline_name = dataset.pipeline.name if dataset.pipeline else ""
    try:
        for index in range(len(history), n_trials):
            config = suggest(history, space, seed)
            t0 = time.perf_counter()
            try:
                trial_seed = _trial_seed(seed, index)
                m = build(config, dataset.n_channels, dataset.length, seed=trial_seed)
                m = train(
                    m, dataset, epochs=epochs, batch=batch, seed=trial_seed, patience=patience
                )
                if m.history:
                    objective = max(h["val_mcc"] for h in m.history)
                else:
                    objective = validation_mcc(m, dataset.val.x, dataset.val.y)
                trial = Trial(index, config, float(objective), "complete",
                              time.perf_counter() - t0)
            except (ShapeUnderflowError, NonFiniteLossError):
                trial = Trial(index, config, -1.0, "failed", time.perf_counter() - t0)
            history.append(trial)
            if log_file is not None:
                log_file.write(json.dumps(trial.as_record()) + "\n")
                log_file.flush()
    finally:
        if log_file is not None:
            log_file.close()

    complete = [t for t in history if t.status == "complete"]
    if not complete:
        raise AllTrialsFailedError(f"all {n_trials} trials failed")
    best = complete[0]
    for t in complete[1:]:
        if t.objective > best.objective or (
            t.objective == best.objective and t.duration_s < best.duration_s
        ):
            best = t

    if dataset.test_access_count != 0:
        raise TestAccessViolation(
            f"test split was read {dataset.test_access_count} times before selection"
        )

    test_split = dataset.test
    reports: list[EvalReport] = []
    best_model = None
    retrain_epochs = epochs if retrain_epochs is None else retrain_epochs
    for j in range(retrainings):
        t0 = time.perf_counter()
        retrain_seed = _trial_seed(seed, j, phase=1)
        m = build(best.config, dataset.n_channels, dataset.length, seed=retrain_seed)
        m = train(
            m, dataset, epochs=retrain_epochs, batch=batch, seed=retrain_seed, patience=patience
        )
        matrix = evaluate(m, test_split.x, test_split.y)
        report = EvalReport.from_confusion(
            matrix,
            pipeline=pipeline_name,
            seed=retrain_seed,
            wall_time_s=time.perf_counter() - t0,
        )
        reports.append(report)
        if best_model is None or report.mcc > max(r.mcc for r in reports[:-1]):
            best_model = m
    return StudyResult(trials=history, best=best, retrain_reports=reports, best_model=best_model)
