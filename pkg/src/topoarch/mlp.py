"""Fully-connected ReLU binary classifiers and their training protocol.

Networks are described by (ell, h0): ell hidden layers, the first of width h0,
the rest at the trunk width (set to the dataset's beta_0), two output logits.
Training is mini-batch Adam on softmax cross-entropy with an increasing batch
size schedule and a held-out error curve.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .data import LabeledPointCloud
from .errors import (
    DimensionMismatchError,
    DivergenceError,
    InvalidArchitectureError,
    InvalidParameterError,
)

MAX_DEPTH = 6
MAX_WIDTH = 500

CHECKPOINT_MAGIC = b"TAMC"
CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class Architecture:
    """(ell, h0) with trunk layers at width trunk_width = beta_0(D)."""

    ell: int
    h0: int
    trunk_width: int = 1

    def __post_init__(self):
        if not (1 <= self.ell <= MAX_DEPTH):
            raise InvalidArchitectureError(f"depth must be in 1..{MAX_DEPTH}, got {self.ell}")
        if not (1 <= self.h0 <= MAX_WIDTH):
            raise InvalidArchitectureError(f"h0 must be in 1..{MAX_WIDTH}, got {self.h0}")
        if self.trunk_width < 1:
            raise InvalidArchitectureError(f"trunk width must be >= 1, got {self.trunk_width}")

    def widths(self) -> list:
        return [self.h0] + [self.trunk_width] * (self.ell - 1)


class MLPModel:
    """Weight matrices and bias vectors; ReLU on hidden layers, 2 logits out."""

    def __init__(self, weights, biases):
        if len(weights) != len(biases):
            raise InvalidArchitectureError("weights/biases length mismatch")
        self.weights = [np.asarray(w, dtype=np.float64) for w in weights]
        self.biases = [np.asarray(b, dtype=np.float64) for b in biases]
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.ndim != 1 or w.shape[1] != b.shape[0]:
                raise InvalidArchitectureError(f"layer {k} shapes do not chain")
            if k > 0 and self.weights[k - 1].shape[1] != w.shape[0]:
                raise InvalidArchitectureError(f"layer {k} input does not match layer {k - 1} output")
        if self.weights[-1].shape[1] != 2:
            raise InvalidArchitectureError("output layer must emit 2 logits")
        if any(not np.all(np.isfinite(w)) for w in self.weights) or \
           any(not np.all(np.isfinite(b)) for b in self.biases):
            raise InvalidParameterError("parameters must be finite")

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def copy(self) -> "MLPModel":
        return MLPModel([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def parameters(self):
        return list(self.weights) + list(self.biases)


FIRST_BIAS_INIT = 0.1
TRUNK_BIAS_INIT = 0.3
OUTPUT_WEIGHT_SCALE = 0.1


def init_model(arch: Architecture, input_dim: int, beta0: int, seed) -> MLPModel:
    """Hidden weights ~ N(0, 1/beta0) (variance scaled by the data's
    component count); deterministic in the seed.

    Hidden biases start small and positive (0.1 first layer, 0.3 on the
    narrow trunk) and the output head starts damped (weights scaled by 0.1):
    with all-zero biases and a full-scale head, narrow-trunk networks fall
    into dead-unit basins from which no learning rate recovers, flattening
    the width phase transition this protocol is meant to expose."""
    if beta0 < 1:
        raise InvalidParameterError(f"beta0 must be >= 1, got {beta0}")
    if input_dim < 1:
        raise InvalidArchitectureError("input_dim must be >= 1")
    rng = np.random.default_rng(seed)
    std = 1.0 / np.sqrt(beta0)
    dims = [input_dim] + arch.widths() + [2]
    weights, biases = [], []
    n_layers = len(dims) - 1
    for k, (a, b) in enumerate(zip(dims[:-1], dims[1:])):
        w = rng.normal(0.0, std, size=(a, b))
        if k == n_layers - 1:
            w *= OUTPUT_WEIGHT_SCALE
            bias = np.zeros(b)
        elif k == 0:
            bias = np.full(b, FIRST_BIAS_INIT)
        else:
            bias = np.full(b, TRUNK_BIAS_INIT)
        weights.append(w)
        biases.append(bias)
    return MLPModel(weights, biases)


def forward(model: MLPModel, points) -> np.ndarray:
    """Logits per point (n, 2)."""
    x = np.asarray(points, dtype=np.float64)
    squeeze = x.ndim == 1
    if squeeze:
        x = x[None, :]
    if x.shape[1] != model.input_dim:
        raise DimensionMismatchError(
            f"points have dimension {x.shape[1]}, model expects {model.input_dim}")
    h = x
    last = model.n_layers - 1
    for k, (w, b) in enumerate(zip(model.weights, model.biases)):
        h = h @ w + b
        if k < last:
            np.maximum(h, 0.0, out=h)
    return h[0] if squeeze else h


def decide(model: MLPModel, points) -> np.ndarray:
    """Predicted class per point; ties go to class 0."""
    logits = np.atleast_2d(forward(model, points))
    return (logits[:, 1] > logits[:, 0]).astype(np.int64)


def _log_softmax(z):
    zmax = z.max(axis=1, keepdims=True)
    zs = z - zmax
    return zs - np.log(np.exp(zs).sum(axis=1, keepdims=True))


def loss_and_grads(model: MLPModel, x, y):
    """Mean softmax cross-entropy and its gradients (backprop)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n = x.shape[0]

    acts = [x]
    h = x
    last = model.n_layers - 1
    for k, (w, b) in enumerate(zip(model.weights, model.biases)):
        h = h @ w + b
        if k < last:
            h = np.maximum(h, 0.0)
        acts.append(h)
    logits = acts[-1]
    logp = _log_softmax(logits)
    loss = -logp[np.arange(n), y].mean()

    delta = np.exp(logp)
    delta[np.arange(n), y] -= 1.0
    delta /= n
    grads_w = [None] * model.n_layers
    grads_b = [None] * model.n_layers
    for k in range(last, -1, -1):
        grads_w[k] = acts[k].T @ delta
        grads_b[k] = delta.sum(axis=0)
        if k > 0:
            delta = (delta @ model.weights[k].T) * (acts[k] > 0.0)
    return loss, grads_w, grads_b


def misclassification(model: MLPModel, x, y) -> float:
    return float(np.mean(decide(model, x) != np.asarray(y)))


@dataclass(frozen=True)
class BatchSchedule:
    initial: int = 32
    growth: int = 2
    epochs_per_step: int = 2
    max_size: int = 1024

    def size_at(self, epoch: int, n_train: int) -> int:
        size = self.initial * self.growth ** (epoch // self.epochs_per_step)
        cap = n_train if self.max_size is None else min(self.max_size, n_train)
        return int(min(size, cap))


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    batch_schedule: BatchSchedule = field(default_factory=BatchSchedule)
    max_steps: int = 20_000
    target_error: float = 0.05
    eval_interval: int = 100
    patience: int = 2_000
    holdout_frac: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.target_error < 1.0):
            raise InvalidParameterError("target_error must be in (0, 1)")
        if self.max_steps < 1 or self.eval_interval < 1:
            raise InvalidParameterError("max_steps and eval_interval must be >= 1")
        if not (0.0 < self.holdout_frac < 1.0):
            raise InvalidParameterError("holdout_frac must be in (0, 1)")


@dataclass
class TrainResult:
    error_curve: list                 # (step, held-out misclassification)
    loss_curve: list                  # per-step training loss
    converged_at: int | None
    final_model: MLPModel
    best_error: float
    steps_run: int


def stratified_split(labels, holdout_frac, rng):
    """Deterministic per-class split; returns (train_idx, eval_idx)."""
    train, evali = [], []
    for cls in (0, 1):
        idx = np.nonzero(labels == cls)[0]
        perm = rng.permutation(idx.shape[0])
        n_eval = max(1, int(np.floor(idx.shape[0] * holdout_frac)))
        evali.append(idx[perm[:n_eval]])
        train.append(idx[perm[n_eval:]])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(evali))


def train(model: MLPModel, cloud: LabeledPointCloud, config: TrainConfig) -> TrainResult:
    """Adam on softmax cross-entropy following the increasing-batch schedule;
    held-out error every eval_interval steps; stops at max_steps or a
    patience window after first reaching target_error."""
    labels = cloud.labels
    if len(np.unique(labels)) < 2:
        raise InvalidParameterError("training data must contain both classes")
    rng = np.random.default_rng(config.seed)
    train_idx, eval_idx = stratified_split(labels, config.holdout_frac, rng)
    x_train, y_train = cloud.points[train_idx], labels[train_idx]
    x_eval, y_eval = cloud.points[eval_idx], labels[eval_idx]
    n_train = x_train.shape[0]
    if config.batch_schedule.initial > n_train:
        raise InvalidParameterError("initial batch size exceeds the training split")

    model = model.copy()
    params = model.weights + model.biases
    m = [np.zeros_like(p) for p in params]
    v = [np.zeros_like(p) for p in params]
    t = 0

    error_curve = []
    loss_curve = []
    converged_at = None
    step = 0
    epoch = 0

    def evaluate(s):
        nonlocal converged_at
        err = misclassification(model, x_eval, y_eval)
        error_curve.append((s, err))
        if converged_at is None and err <= config.target_error:
            converged_at = s
        return err

    evaluate(0)
    done = False
    while not done:
        bs = config.batch_schedule.size_at(epoch, n_train)
        perm = rng.permutation(n_train)
        for start in range(0, n_train, bs):
            batch = perm[start:start + bs]
            loss, gw, gb = loss_and_grads(model, x_train[batch], y_train[batch])
            if not np.isfinite(loss):
                raise DivergenceError(f"loss diverged at step {step}", step=step)
            loss_curve.append(float(loss))
            t += 1
            grads = gw + gb
            b1t = 1.0 - config.beta1 ** t
            b2t = 1.0 - config.beta2 ** t
            for p, g, mi, vi in zip(params, grads, m, v):
                mi *= config.beta1
                mi += (1.0 - config.beta1) * g
                vi *= config.beta2
                vi += (1.0 - config.beta2) * g * g
                p -= config.learning_rate * (mi / b1t) / (np.sqrt(vi / b2t) + config.adam_eps)
            step += 1
            if step % config.eval_interval == 0:
                evaluate(step)
            if step >= config.max_steps:
                done = True
                break
            if converged_at is not None and step >= converged_at + config.patience:
                done = True
                break
        epoch += 1

    if error_curve[-1][0] != step:
        evaluate(step)
    best_error = min(e for _, e in error_curve)
    return TrainResult(
        error_curve=error_curve,
        loss_curve=loss_curve,
        converged_at=converged_at,
        final_model=model,
        best_error=best_error,
        steps_run=step,
    )


def save_checkpoint(model: MLPModel, path) -> None:
    """Flat binary layout: magic 'TAMC', uint32 version, uint32 n_layers,
    uint32 input_dim, uint32 output width per layer, then per layer the
    row-major weight matrix followed by the bias vector, little-endian f64."""
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<III", CHECKPOINT_VERSION, model.n_layers, model.input_dim))
        for w in model.weights:
            fh.write(struct.pack("<I", w.shape[1]))
        for w, b in zip(model.weights, model.biases):
            fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(b, dtype="<f8").tobytes())


def load_checkpoint(path) -> MLPModel:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != CHECKPOINT_MAGIC:
            raise InvalidParameterError(f"bad checkpoint magic {magic!r}")
        version, n_layers, input_dim = struct.unpack("<III", fh.read(12))
        if version != CHECKPOINT_VERSION:
            raise InvalidParameterError(f"unsupported checkpoint version {version}")
        widths = struct.unpack(f"<{n_layers}I", fh.read(4 * n_layers))
        weights, biases = [], []
        prev = input_dim
        for out in widths:
            w = np.frombuffer(fh.read(8 * prev * out), dtype="<f8").reshape(prev, out)
            b = np.frombuffer(fh.read(8 * out), dtype="<f8")
            weights.append(w.copy())
            biases.append(b.copy())
            prev = out
    return MLPModel(weights, biases)
