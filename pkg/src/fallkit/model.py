"""From-scratch one-dimensional convolutional binary classifier.

Architecture, parameterized by the eight searched hyperparameters: h3 blocks
of [valid conv (h1 maps, kernel h2, stride 1) -> ReLU -> max-pool 2], then
h4 dense layers of h5 ReLU units with dropout h6, then one sigmoid output.
Training minimizes binary cross-entropy with Adam (lr = h7) and restores the
parameters of the epoch with the best validation MCC; h8 is the probability
threshold that turns a sigmoid output into a fall/non-fall decision.

Everything is plain numpy so the gradients can be verified against finite
differences.  Forward convolution is a sum of K shifted batched GEMMs, which
is the fastest formulation BLAS gives us for small kernels.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .features import Example, PipelineId, ScenarioDataset
from .metrics import ConfusionMatrix, mcc

LEARNING_RATES = (0.0001, 0.0003, 0.0006, 0.001, 0.003, 0.006, 0.01)
DROPOUT_GRID = (0.2, 0.3, 0.4, 0.5)
THRESHOLD_GRID = (0.5, 0.6, 0.7, 0.8, 0.9)

DEFAULT_EPOCHS = 100
DEFAULT_BATCH = 32
DEFAULT_PATIENCE = 10
ADAM_BETAS = (0.9, 0.999)
ADAM_EPS = 1e-8


class ShapeUnderflowError(ValueError):
    """The conv/pool stack ran out of positions; carries the offending block."""

    def __init__(self, message: str, block: int):
        super().__init__(message)
        self.block = block


class ShapeMismatchError(ValueError):
    """Input shape does not match the model's (channels, length)."""


class NonFiniteLossError(RuntimeError):
    """Training diverged; carries the last epoch that was still finite."""

    def __init__(self, message: str, last_finite_epoch: int, history: list):
        super().__init__(message)
        self.last_finite_epoch = last_finite_epoch
        self.history = history


def _in_grid(value: float, grid: Sequence[float]) -> bool:
    return any(math.isclose(value, g, rel_tol=0.0, abs_tol=1e-9) for g in grid)


@dataclass(frozen=True)
class Cnn1dConfig:
    """The eight searched hyperparameters; each is validated against its range."""

    feature_maps: int  # h1: 8..600
    kernel_size: int  # h2: 2..6
    conv_layers: int  # h3: 2..4
    dense_layers: int  # h4: 1..3
    dense_neurons: int  # h5: 60..320
    dropout: float  # h6: {0.2, 0.3, 0.4, 0.5}
    learning_rate: float  # h7: 7-value list
    decision_threshold: float  # h8: {0.5 .. 0.9}

    def __post_init__(self) -> None:
        checks = [
            (8 <= self.feature_maps <= 600, "feature_maps outside [8, 600]"),
            (2 <= self.kernel_size <= 6, "kernel_size outside [2, 6]"),
            (2 <= self.conv_layers <= 4, "conv_layers outside [2, 4]"),
            (1 <= self.dense_layers <= 3, "dense_layers outside [1, 3]"),
            (60 <= self.dense_neurons <= 320, "dense_neurons outside [60, 320]"),
            (_in_grid(self.dropout, DROPOUT_GRID), f"dropout {self.dropout} not in {DROPOUT_GRID}"),
            (
                _in_grid(self.learning_rate, LEARNING_RATES),
                f"learning_rate {self.learning_rate} not in {LEARNING_RATES}",
            ),
            (
                _in_grid(self.decision_threshold, THRESHOLD_GRID),
                f"decision_threshold {self.decision_threshold} not in {THRESHOLD_GRID}",
            ),
        ]
        for ok, message in checks:
            if not ok:
                raise ValueError(message)

    def as_dict(self) -> dict:
        return {
            "feature_maps": self.feature_maps,
            "kernel_size": self.kernel_size,
            "conv_layers": self.conv_layers,
            "dense_layers": self.dense_layers,
            "dense_neurons": self.dense_neurons,
            "dropout": self.dropout,
            "learning_rate": self.learning_rate,
            "decision_threshold": self.decision_threshold,
        }


def conv_stack_lengths(length: int, kernel: int, blocks: int) -> list[int]:
    """Sequence of positions after each conv and pool stage.

    Raises :class:`ShapeUnderflowError` naming the first block (1-based) whose
    conv or pool output would be empty.
    """
    out = []
    d = length
    for b in range(1, blocks + 1):
        d = d - kernel + 1
        if d < 1:
            raise ShapeUnderflowError(
                f"conv block {b} underflows: {out[-1] if out else length} positions "
                f"with kernel {kernel}",
                block=b,
            )
        out.append(d)
        d = d // 2
        if d < 1:
            raise ShapeUnderflowError(f"pool in block {b} underflows to zero positions", block=b)
        out.append(d)
    return out


@dataclass
class TrainedModel:
    """Parameters plus metadata; immutable by convention once training returns."""

    config: Cnn1dConfig
    channels: int
    length: int
    params: dict[str, np.ndarray]
    history: list[dict] = field(default_factory=list)
    pipeline: PipelineId | None = None
    norm_mean: np.ndarray | None = None
    norm_std: np.ndarray | None = None
    dtype: type = np.float32

    def predict_proba(self, example):
        return predict_proba(self, example)

    def classify(self, example):
        return classify(self, example)

    @property
    def decision_threshold(self) -> float:
        return self.config.decision_threshold


def build(config: Cnn1dConfig, channels: int, length: int, seed: int, dtype=np.float32) -> TrainedModel:
    """Initialize an untrained model; deterministic under ``seed``.

    Weights are fan-in-scaled uniform, biases zero.  Raises
    :class:`ShapeUnderflowError` when ``length`` cannot survive the conv/pool
    stack.
    """
    lengths = conv_stack_lengths(length, config.kernel_size, config.conv_layers)
    rng = np.random.default_rng(seed)
    params: dict[str, np.ndarray] = {}

    def _uniform(shape, fan_in):
        bound = 1.0 / math.sqrt(fan_in)
        return rng.uniform(-bound, bound, size=shape).astype(dtype)

    c_in = channels
    for i in range(config.conv_layers):
        params[f"conv{i}_w"] = _uniform(
            (config.feature_maps, c_in, config.kernel_size), c_in * config.kernel_size
        )
        params[f"conv{i}_b"] = np.zeros(config.feature_maps, dtype=dtype)
        c_in = config.feature_maps

    flat = config.feature_maps * lengths[-1]
    d_in = flat
    for i in range(config.dense_layers):
        params[f"dense{i}_w"] = _uniform((config.dense_neurons, d_in), d_in)
        params[f"dense{i}_b"] = np.zeros(config.dense_neurons, dtype=dtype)
        d_in = config.dense_neurons
    params["out_w"] = _uniform((1, d_in), d_in)
    params["out_b"] = np.zeros(1, dtype=dtype)

    return TrainedModel(config=config, channels=channels, length=length, params=params, dtype=dtype)


# ---------------------------------------------------------------------------
# Forward / backward
# ---------------------------------------------------------------------------


def _im2col(x: np.ndarray, kernel: int) -> tuple[np.ndarray, int]:
    # x (N, C, D) -> (C*K, N*L) patch matrix; one contiguous copy so the conv
    # becomes a single large GEMM (broadcasted matmul over strided slices
    # falls off the BLAS fast path and is ~30x slower at the sizes we hit).
    n, c, d = x.shape
    length = d - kernel + 1
    s = x.strides
    windows = np.lib.stride_tricks.as_strided(
        x, shape=(n, c, kernel, length), strides=(s[0], s[1], s[2], s[2])
    )
    cols = np.ascontiguousarray(windows.transpose(1, 2, 0, 3)).reshape(c * kernel, n * length)
    return cols, length


def _conv_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray, keep_cols: bool = False):
    # x (N, C, D), w (F, C, K) -> (N, F, D-K+1)
    f, c, kernel = w.shape
    cols, length = _im2col(x, kernel)
    out = w.reshape(f, c * kernel) @ cols
    out += b[:, None]
    out = np.ascontiguousarray(out.reshape(f, x.shape[0], length).transpose(1, 0, 2))
    return out, (cols if keep_cols else None)


def _conv_backward(x_shape: tuple, cols: np.ndarray, w: np.ndarray, dout: np.ndarray):
    f, c, kernel = w.shape
    n, _, length = dout.shape
    dout2 = np.ascontiguousarray(dout.transpose(1, 0, 2)).reshape(f, n * length)
    dw = (dout2 @ cols.T).reshape(f, c, kernel)
    db = dout2.sum(axis=1)
    dcols = (w.reshape(f, c * kernel).T @ dout2).reshape(c, kernel, n, length)
    dx = np.zeros(x_shape, dtype=dout.dtype)
    for k in range(kernel):
        dx[:, :, k : k + length] += dcols[:, k].transpose(1, 0, 2)
    return dx, dw, db


def _pool_forward(x: np.ndarray):
    n, f, d = x.shape
    d_out = d // 2
    xv = x[:, :, : 2 * d_out].reshape(n, f, d_out, 2)
    idx = xv.argmax(axis=-1)
    out = np.take_along_axis(xv, idx[..., None], axis=-1)[..., 0]
    return out, idx


def _pool_backward(dout: np.ndarray, idx: np.ndarray, d_in: int) -> np.ndarray:
    n, f, d_out = dout.shape
    dxv = np.zeros((n, f, d_out, 2), dtype=dout.dtype)
    np.put_along_axis(dxv, idx[..., None], dout[..., None], axis=-1)
    dx = np.zeros((n, f, d_in), dtype=dout.dtype)
    dx[:, :, : 2 * d_out] = dxv.reshape(n, f, 2 * d_out)
    return dx


def _forward(
    model: TrainedModel,
    x: np.ndarray,
    train: bool = False,
    dropout_rng: np.random.Generator | None = None,
):
    """Return (logits, cache); cache is None outside training."""
    cfg = model.config
    p = model.params
    cache: list = [] if train else None
    h = x
    for i in range(cfg.conv_layers):
        w, b = p[f"conv{i}_w"], p[f"conv{i}_b"]
        z, cols = _conv_forward(h, w, b, keep_cols=train)
        relu_mask = z > 0
        a = z * relu_mask
        pooled, pool_idx = _pool_forward(a)
        if train:
            cache.append(("conv", h.shape, cols, relu_mask, pool_idx, a.shape[2]))
        h = pooled
    n = h.shape[0]
    flat_shape = h.shape
    h = h.reshape(n, -1)
    for i in range(cfg.dense_layers):
        w, b = p[f"dense{i}_w"], p[f"dense{i}_b"]
        z = h @ w.T + b
        relu_mask = z > 0
        a = z * relu_mask
        if train and cfg.dropout > 0.0 and dropout_rng is not None:
            keep = 1.0 - cfg.dropout
            mask = (dropout_rng.random(a.shape) < keep).astype(a.dtype) / keep
            a_dropped = a * mask
        else:
            mask = None
            a_dropped = a
        if train:
            cache.append(("dense", h, relu_mask, mask, flat_shape if i == 0 else None))
        h = a_dropped
    logits = (h @ p["out_w"].T + p["out_b"])[:, 0]
    if train:
        cache.append(("out", h))
    return logits, cache


def _bce_from_logits(logits: np.ndarray, y: np.ndarray) -> float:
    # max(z,0) - z*y + log(1 + exp(-|z|)) is the stable per-example loss
    z = logits.astype(np.float64)
    per = np.maximum(z, 0.0) - z * y + np.log1p(np.exp(-np.abs(z)))
    return float(per.mean())


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def loss_and_gradients(
    model: TrainedModel,
    x: np.ndarray,
    y: np.ndarray,
    dropout_rng: np.random.Generator | None = None,
    use_dropout: bool = True,
):
    """Mean BCE loss and gradients for every parameter, in one pass.

    ``use_dropout=False`` gives the deterministic (inference-mode) loss whose
    gradients finite differences can verify.
    """
    cfg = model.config
    p = model.params
    apply_dropout = use_dropout and cfg.dropout > 0.0
    if apply_dropout and dropout_rng is None:
        raise ValueError("dropout requires a generator")
    logits, cache = _forward(
        model,
        x,
        train=True,
        dropout_rng=dropout_rng if apply_dropout else None,
    )
    loss = _bce_from_logits(logits, y)
    grads: dict[str, np.ndarray] = {}
    n = x.shape[0]

    probs = _sigmoid(logits.astype(np.float64))
    dz = ((probs - y) / n).astype(x.dtype)  # (N,)

    _, h_last = cache.pop()
    grads["out_w"] = dz[None, :] @ h_last
    grads["out_b"] = np.array([dz.sum()], dtype=x.dtype)
    dh = dz[:, None] @ p["out_w"]  # (N, d_in)

    for i in range(cfg.dense_layers - 1, -1, -1):
        kind, h_in, relu_mask, mask, flat_shape = cache.pop()
        assert kind == "dense"
        if mask is not None:
            dh = dh * mask
        dz_dense = dh * relu_mask
        grads[f"dense{i}_w"] = dz_dense.T @ h_in
        grads[f"dense{i}_b"] = dz_dense.sum(axis=0)
        dh = dz_dense @ p[f"dense{i}_w"]
        if flat_shape is not None:
            dh = dh.reshape(flat_shape)

    for i in range(cfg.conv_layers - 1, -1, -1):
        kind, x_shape, cols, relu_mask, pool_idx, pre_pool_len = cache.pop()
        assert kind == "conv"
        da = _pool_backward(dh, pool_idx, pre_pool_len)
        dz_conv = da * relu_mask
        dx, dw, db = _conv_backward(x_shape, cols, p[f"conv{i}_w"], dz_conv)
        grads[f"conv{i}_w"] = dw
        grads[f"conv{i}_b"] = db
        dh = dx

    return loss, grads


def predict_proba(model: TrainedModel, example):
    """Fall probability in [0, 1]; dropout disabled, bit-deterministic."""
    if isinstance(example, Example):
        example = example.channels
    x = np.asarray(example, dtype=model.dtype)
    single = x.ndim == 2
    if single:
        x = x[None]
    if x.ndim != 3 or x.shape[1:] != (model.channels, model.length):
        raise ShapeMismatchError(
            f"expected (*, {model.channels}, {model.length}), got shape {np.shape(example)}"
        )
    logits, _ = _forward(model, x, train=False)
    probs = _sigmoid(logits.astype(np.float64))
    return float(probs[0]) if single else probs


def classify(model: TrainedModel, example):
    """1 iff predict_proba >= the configured decision threshold."""
    probs = predict_proba(model, example)
    thr = model.config.decision_threshold
    if isinstance(probs, float):
        return int(probs >= thr)
    return (probs >= thr).astype(np.int64)


def _predict_batched(model: TrainedModel, x: np.ndarray, batch: int = 512) -> np.ndarray:
    out = np.empty(x.shape[0], dtype=np.float64)
    for i in range(0, x.shape[0], batch):
        logits, _ = _forward(model, x[i : i + batch].astype(model.dtype), train=False)
        out[i : i + batch] = _sigmoid(logits.astype(np.float64))
    return out


def _fast_confusion(y: np.ndarray, preds: np.ndarray) -> ConfusionMatrix:
    tp = int(np.sum((y == 1) & (preds == 1)))
    tn = int(np.sum((y == 0) & (preds == 0)))
    fp = int(np.sum((y == 0) & (preds == 1)))
    fn = int(np.sum((y == 1) & (preds == 0)))
    return ConfusionMatrix(tp=tp, tn=tn, fp=fp, fn=fn)


def validation_mcc(model: TrainedModel, x: np.ndarray, y: np.ndarray) -> float:
    preds = (_predict_batched(model, x) >= model.config.decision_threshold).astype(np.int64)
    return mcc(_fast_confusion(np.asarray(y), preds))


def train(
    model: TrainedModel,
    dataset: ScenarioDataset,
    epochs: int = DEFAULT_EPOCHS,
    batch: int = DEFAULT_BATCH,
    seed: int = 0,
    patience: int = DEFAULT_PATIENCE,
    stop_at_perfect: bool = True,
) -> TrainedModel:
    """Train a copy of ``model`` on the dataset's train split.

    Tracks validation MCC per epoch, restores the best epoch's parameters and
    stops early after ``patience`` epochs without improvement.  With
    ``stop_at_perfect`` (default) training also halts as soon as validation
    MCC reaches 1, since the monitored objective cannot improve further.  The
    input model is left untouched; results are deterministic under ``seed``.
    """
    if (dataset.n_channels, dataset.length) != (model.channels, model.length):
        raise ShapeMismatchError(
            f"dataset is ({dataset.n_channels}, {dataset.length}), "
            f"model expects ({model.channels}, {model.length})"
        )
    rng = np.random.default_rng(seed)
    work = TrainedModel(
        config=model.config,
        channels=model.channels,
        length=model.length,
        params={k: v.copy() for k, v in model.params.items()},
        pipeline=dataset.pipeline,
        norm_mean=None if dataset.norm_mean is None else dataset.norm_mean.copy(),
        norm_std=None if dataset.norm_std is None else dataset.norm_std.copy(),
        dtype=model.dtype,
    )
    x_train = dataset.train.x.astype(model.dtype)
    y_train = dataset.train.y.astype(np.float64)
    x_val = dataset.val.x.astype(model.dtype)
    y_val = dataset.val.y

    m_state = {k: np.zeros_like(v) for k, v in work.params.items()}
    v_state = {k: np.zeros_like(v) for k, v in work.params.items()}
    beta1, beta2 = ADAM_BETAS
    lr = model.config.learning_rate
    step = 0

    best_mcc = -np.inf
    best_params = {k: v.copy() for k, v in work.params.items()}
    best_epoch = -1
    history: list[dict] = []

    for epoch in range(epochs):
        order = rng.permutation(x_train.shape[0])
        losses = []
        for start in range(0, order.size, batch):
            sel = order[start : start + batch]
            loss, grads = loss_and_gradients(
                work, x_train[sel], y_train[sel], dropout_rng=rng
            )
            if not np.isfinite(loss):
                raise NonFiniteLossError(
                    f"loss became non-finite in epoch {epoch}; "
                    f"last finite epoch was {epoch - 1}",
                    last_finite_epoch=epoch - 1,
                    history=history,
                )
            losses.append(loss)
            step += 1
            bc1 = 1.0 - beta1**step
            bc2 = 1.0 - beta2**step
            for key, g in grads.items():
                m_state[key] = beta1 * m_state[key] + (1 - beta1) * g
                v_state[key] = beta2 * v_state[key] + (1 - beta2) * (g * g)
                work.params[key] -= (
                    lr * (m_state[key] / bc1) / (np.sqrt(v_state[key] / bc2) + ADAM_EPS)
                ).astype(work.params[key].dtype)
        val_mcc = validation_mcc(work, x_val, y_val)
        history.append({"epoch": epoch, "train_loss": float(np.mean(losses)), "val_mcc": val_mcc})
        if val_mcc > best_mcc:
            best_mcc = val_mcc
            best_epoch = epoch
            best_params = {k: v.copy() for k, v in work.params.items()}
        elif epoch - best_epoch >= patience:
            break
        if stop_at_perfect and best_mcc >= 1.0:
            break

    work.params = best_params
    work.history = history
    return work


def evaluate(model: TrainedModel, x: np.ndarray, y: np.ndarray) -> ConfusionMatrix:
    """Confusion matrix of thresholded predictions on one split."""
    preds = (_predict_batched(model, np.asarray(x)) >= model.config.decision_threshold).astype(
        np.int64
    )
    return _fast_confusion(np.asarray(y), preds)


# ---------------------------------------------------------------------------
# Checkpoints
# ---------------------------------------------------------------------------

_CHECKPOINT_VERSION = 1


def save_checkpoint(model: TrainedModel, path: str | Path) -> None:
    """Single-file checkpoint: JSON header plus the flat parameter arrays."""
    header = {
        "version": _CHECKPOINT_VERSION,
        "config": model.config.as_dict(),
        "channels": model.channels,
        "length": model.length,
        "dtype": np.dtype(model.dtype).name,
        "pipeline": None
        if model.pipeline is None
        else {
            "scenario": model.pipeline.scenario.value,
            "domain": model.pipeline.domain.value,
            "scheme": model.pipeline.scheme.value,
            "position": model.pipeline.position.value,
        },
        "has_norm": model.norm_mean is not None,
        "param_names": sorted(model.params),
    }
    arrays = {f"param_{k}": v for k, v in model.params.items()}
    if model.norm_mean is not None:
        arrays["norm_mean"] = model.norm_mean
        arrays["norm_std"] = model.norm_std
    arrays["header"] = np.frombuffer(json.dumps(header).encode(), dtype=np.uint8)
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)


def load_checkpoint(path: str | Path) -> TrainedModel:
    from .activities import BodyPosition, LabelingScheme
    from .features import FeatureDomain, Scenario

    with np.load(path) as data:
        header = json.loads(bytes(data["header"]).decode())
        if header["version"] != _CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {header['version']}")
        pipeline = None
        if header["pipeline"] is not None:
            hp = header["pipeline"]
            pipeline = PipelineId(
                scenario=Scenario(hp["scenario"]),
                domain=FeatureDomain(hp["domain"]),
                scheme=LabelingScheme(hp["scheme"]),
                position=BodyPosition(hp["position"]),
            )
        return TrainedModel(
            config=Cnn1dConfig(**header["config"]),
            channels=header["channels"],
            length=header["length"],
            params={k: data[f"param_{k}"] for k in header["param_names"]},
            pipeline=pipeline,
            norm_mean=data["norm_mean"] if header["has_norm"] else None,
            norm_std=data["norm_std"] if header["has_norm"] else None,
            dtype=np.dtype(header["dtype"]).type,
        )
