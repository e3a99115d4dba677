"""Feed-forward regressor from features to a relatedness score.

Architecture [42, 25, 50, 25, 1]: GELU hidden layers (exact Gaussian-CDF
form), sigmoid output, trained with mini-batch gradient descent and
decoupled weight decay on the MSE loss. Pure numpy, fully deterministic
given a seed.
"""

import json
import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .errors import DimMismatch, DivergedLoss, EmptyData, NonFiniteInput
from .evaluation import spearman
from .errors import ConstantInput

LAYER_SIZES = [42, 25, 50, 25, 1]
SMLP_MAGIC = b"SMLP"
SMLP_VERSION = 1

_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def gelu(x):
    return x * ndtr(x)


def gelu_grad(x):
    return ndtr(x) + x * _INV_SQRT_2PI * np.exp(-0.5 * x * x)


def sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


@dataclass
class TrainConfig:
    learning_rate: float = 1e-3
    weight_decay: float = 0.01
    epochs: int = 100
    batch_size: int = 32
    dropout: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0 or self.epochs < 0 or self.batch_size <= 0:
            raise ValueError("learning_rate/batch_size must be positive, epochs >= 0")
        if not (0.0 <= self.dropout < 1.0):
            raise ValueError("dropout must be in [0, 1)")


@dataclass
class EpochStats:
    epoch: int
    train_mse: float
    val_mse: float
    val_spearman: float


@dataclass
class TrainReport:
    epochs: list = field(default_factory=list)


class MlpRegressor:
    def __init__(self, weights, biases, dropout_rate=0.1, rng_seed=0):
        self.layer_sizes = [weights[0].shape[0]] + [w.shape[1] for w in weights]
        self.weights = weights
        self.biases = biases
        self.dropout_rate = dropout_rate
        self.rng_seed = rng_seed

    def copy(self):
        return MlpRegressor(
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
            self.dropout_rate,
            self.rng_seed,
        )

    def n_parameters(self) -> int:
        return sum(w.size for w in self.weights) + sum(b.size for b in self.biases)

    def flat_parameters(self) -> np.ndarray:
        return np.concatenate([p.ravel() for p in self.weights + self.biases])

    def set_flat_parameters(self, flat) -> None:
        pos = 0
        for p in self.weights + self.biases:
            p[...] = flat[pos : pos + p.size].reshape(p.shape)
            pos += p.size


def init(seed: int, layer_sizes=None, dropout_rate: float = 0.1) -> MlpRegressor:
    """Fan-in-scaled uniform weight init, zero biases; deterministic per seed."""
    sizes = list(layer_sizes or LAYER_SIZES)
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpRegressor(weights, biases, dropout_rate, seed)


def _forward_batch(m: MlpRegressor, X, dropout_masks=None):
    """Returns (predictions, per-layer caches for backprop)."""
    caches = []
    a = X
    n_hidden = len(m.weights) - 1
    for i in range(n_hidden):
        z = a @ m.weights[i] + m.biases[i]
        h = gelu(z)
        mask = dropout_masks[i] if dropout_masks is not None else None
        if mask is not None:
            h = h * mask
        caches.append((a, z, mask))
        a = h
    z_out = a @ m.weights[-1] + m.biases[-1]
    pred = sigmoid(z_out)
    caches.append((a, z_out, None))
    return pred[:, 0], caches


def forward(m: MlpRegressor, x, train_mode: bool = False, rng=None) -> float:
    """Score one feature vector; dropout only when train_mode with an rng."""
    values = np.asarray(getattr(x, "values", x), dtype=np.float64)
    if values.shape != (m.layer_sizes[0],):
        raise DimMismatch(f"expected {m.layer_sizes[0]} features, got {values.shape}")
    if not np.all(np.isfinite(values)):
        raise NonFiniteInput("non-finite feature value")
    masks = None
    if train_mode and m.dropout_rate > 0.0:
        if rng is None:
            rng = np.random.default_rng(m.rng_seed)
        masks = _dropout_masks(m, rng, 1)
    pred, _ = _forward_batch(m, values[None, :], masks)
    return float(pred[0])


def _dropout_masks(m: MlpRegressor, rng, n_rows):
    p = m.dropout_rate
    masks = []
    for size in m.layer_sizes[1:-1]:
        keep = rng.random((n_rows, size)) >= p
        masks.append(keep / (1.0 - p))  # inverted scaling
    return masks


def _grads(m: MlpRegressor, X, Y, dropout_masks=None):
    """MSE loss and analytic gradients for a batch."""
    pred, caches = _forward_batch(m, X, dropout_masks)
    n = len(Y)
    err = pred - Y
    loss = float(np.mean(err**2))

    dW = [None] * len(m.weights)
    dB = [None] * len(m.biases)
    # output layer: d loss / d z_out through sigmoid
    delta = (2.0 / n) * err * pred * (1.0 - pred)
    delta = delta[:, None]
    for i in range(len(m.weights) - 1, -1, -1):
        a_in, z, mask = caches[i]
        dW[i] = a_in.T @ delta
        dB[i] = delta.sum(axis=0)
        if i > 0:
            upstream = delta @ m.weights[i].T
            _, z_prev, mask_prev = caches[i - 1]
            if mask_prev is not None:
                upstream = upstream * mask_prev
            delta = upstream * gelu_grad(z_prev)
    return loss, dW, dB


def train(m: MlpRegressor, data, cfg: TrainConfig, val_data=None):
    """Mini-batch gradient descent with decoupled weight decay.

    data is a list of (FeatureVector, gold_score); validation defaults to
    the training data. Deterministic given cfg.seed.
    """
    if not data:
        raise EmptyData("no training data")
    X = np.stack([np.asarray(getattr(f, "values", f), dtype=np.float64) for f, _ in data])
    Y = np.array([y for _, y in data], dtype=np.float64)
    if not np.all(np.isfinite(X)):
        raise NonFiniteInput("non-finite feature value")
    if val_data is None:
        Xv, Yv = X, Y
    else:
        Xv = np.stack([np.asarray(getattr(f, "values", f), dtype=np.float64) for f, _ in val_data])
        Yv = np.array([y for _, y in val_data], dtype=np.float64)

    model = m.copy()
    model.dropout_rate = cfg.dropout
    rng = np.random.default_rng(cfg.seed)
    report = TrainReport()
    n = len(Y)
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            masks = (
                _dropout_masks(model, rng, len(idx)) if cfg.dropout > 0.0 else None
            )
            loss, dW, dB = _grads(model, X[idx], Y[idx], masks)
            if not np.isfinite(loss):
                raise DivergedLoss(f"loss became non-finite at epoch {epoch}")
            for i in range(len(model.weights)):
                model.weights[i] -= cfg.learning_rate * dW[i]
                model.biases[i] -= cfg.learning_rate * dB[i]
                if cfg.weight_decay > 0.0:
                    model.weights[i] *= 1.0 - cfg.learning_rate * cfg.weight_decay
        for p in model.weights + model.biases:
            if not np.all(np.isfinite(p)):
                raise DivergedLoss(f"parameters non-finite after epoch {epoch}")
        train_pred, _ = _forward_batch(model, X)
        val_pred, _ = _forward_batch(model, Xv)
        try:
            rho = spearman(val_pred, Yv)
        except ConstantInput:
            rho = float("nan")
        report.epochs.append(
            EpochStats(
                epoch=epoch,
                train_mse=float(np.mean((train_pred - Y) ** 2)),
                val_mse=float(np.mean((val_pred - Yv) ** 2)),
                val_spearman=rho,
            )
        )
    return model, report


def grad_check(m: MlpRegressor, x, y: float, h: float = 1e-5) -> float:
    """Max relative error of analytic MSE gradients vs central differences.

    Dropout must be disabled. Gradients below 1e-6 in magnitude are
    judged by absolute error so a critical point does not blow up the
    relative measure.
    """
    values = np.asarray(getattr(x, "values", x), dtype=np.float64)[None, :]
    target = np.array([y], dtype=np.float64)
    model = m.copy()
    _, dW, dB = _grads(model, values, target)
    analytic = np.concatenate([g.ravel() for g in dW + dB])

    flat = model.flat_parameters()
    numeric = np.empty_like(flat)
    for i in range(len(flat)):
        orig = flat[i]
        flat[i] = orig + h
        model.set_flat_parameters(flat)
        lp, _, _ = _grads(model, values, target)
        flat[i] = orig - h
        model.set_flat_parameters(flat)
        lm, _, _ = _grads(model, values, target)
        flat[i] = orig
        numeric[i] = (lp - lm) / (2.0 * h)
    model.set_flat_parameters(flat)

    diff = np.abs(analytic - numeric)
    scale = np.maximum(np.abs(analytic), np.abs(numeric))
    # near-zero gradients drown in finite-difference rounding noise, so
    # they are judged by absolute error instead of relative error
    tiny = scale < 1e-6
    errors = np.where(tiny, diff, diff / np.maximum(scale, 1e-300))
    return float(np.max(errors))


# --- checkpoint io --------------------------------------------------------

def save_checkpoint(m: MlpRegressor, path, metadata: dict | None = None) -> None:
    """SMLP binary (layer sizes + 64-bit LE params) with a JSON sidecar."""
    with open(path, "wb") as fh:
        fh.write(SMLP_MAGIC)
        fh.write(struct.pack("<II", SMLP_VERSION, len(m.layer_sizes)))
        fh.write(struct.pack(f"<{len(m.layer_sizes)}I", *m.layer_sizes))
        fh.write(m.flat_parameters().astype("<f8").tobytes())
    meta = dict(metadata or {})
    meta.setdefault("layer_sizes", m.layer_sizes)
    meta.setdefault("dropout_rate", m.dropout_rate)
    meta.setdefault("rng_seed", m.rng_seed)
    with open(str(path) + ".json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_checkpoint(path):
    """Returns (model, metadata)."""
    with open(path, "rb") as fh:
        if fh.read(4) != SMLP_MAGIC:
            raise ValueError("not an SMLP checkpoint")
        version, n_layers = struct.unpack("<II", fh.read(8))
        if version != SMLP_VERSION:
            raise ValueError(f"unsupported SMLP version {version}")
        sizes = list(struct.unpack(f"<{n_layers}I", fh.read(4 * n_layers)))
        flat = np.frombuffer(fh.read(), dtype="<f8").astype(np.float64)
    with open(str(path) + ".json", encoding="utf-8") as fh:
        meta = json.load(fh)
    model = init(int(meta.get("rng_seed", 0)), sizes, float(meta.get("dropout_rate", 0.1)))
    if len(flat) != model.n_parameters():
        raise ValueError("checkpoint parameter count mismatch")
    model.set_flat_parameters(flat)
    return model, meta
