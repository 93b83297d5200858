"""From-scratch dense network used as the learned array detector.

Architecture: N^2 inputs -> 4*N^2 ReLU -> 2*N^2 ReLU -> N^2 sigmoid.
Inputs are measured resistances scaled by a fixed normalizer (1/r0 by
default); outputs are per-cell soft estimates of the stored bits.
Training is plain mini-batch Adam on mean binary cross-entropy, all in
64-bit numpy, fully deterministic for a given seed.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from . import codec as gs
from .channel import ChannelParams, random_array, transmit
from .detectors import ThresholdDetector, classify_array
from .rng import STREAM_DATA, STREAM_FAILURES, STREAM_NOISE, derive_rng

MAGIC = b"SPMLP1"

AFFECTED_ONLY = "affected_only"
ALL = "all"


class FilterStarvationError(RuntimeError):
    """Raised when the affected-array filter cannot fill the requested count."""


@dataclass
class MlpModel:
    dims: list[int]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    normalizer: float
    inference_calls: int = 0  # bumped per forward batch, for power accounting

    @property
    def n_layers(self) -> int:
        return len(self.weights)


def init_model(n_inputs: int, seed: int, normalizer: float = 1.0 / 1000.0) -> MlpModel:
    """Seeded He/Xavier initialization of the 4-layer detector network."""
    dims = [n_inputs, 4 * n_inputs, 2 * n_inputs, n_inputs]
    return _init_from_dims(dims, seed, normalizer)


def _init_from_dims(dims: list[int], seed: int, normalizer: float) -> MlpModel:
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    weights, biases = [], []
    for i in range(len(dims) - 1):
        fan_in, fan_out = dims[i], dims[i + 1]
        if i < len(dims) - 2:  # ReLU layers: He scaling
            scale = np.sqrt(2.0 / fan_in)
        else:  # sigmoid output: Xavier scaling
            scale = np.sqrt(1.0 / fan_in)
        weights.append(rng.normal(0.0, scale, (fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(dims=list(dims), weights=weights, biases=biases, normalizer=normalizer)


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _forward_pass(model: MlpModel, x: np.ndarray) -> list[np.ndarray]:
    """Return post-activation values per layer, input included."""
    acts = [x]
    h = x
    last = model.n_layers - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = h @ w + b
        h = sigmoid(z) if i == last else relu(z)
        acts.append(h)
    return acts


def forward(model: MlpModel, x: np.ndarray) -> np.ndarray:
    """Soft estimates in (0,1) for one input vector or a batch."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != model.dims[0]:
        raise ValueError(f"expected {model.dims[0]} inputs, got {x.shape[-1]}")
    if not np.isfinite(x).all():
        raise ValueError("non-finite input")
    model.inference_calls += 1
    return _forward_pass(model, x)[-1]


def hard_decide(model: MlpModel, reads: np.ndarray) -> np.ndarray:
    """Detect a full read array: normalize, run the net, threshold at 0.5."""
    n = reads.shape[0]
    soft = forward(model, reads.reshape(-1) * model.normalizer)
    return (soft > 0.5).astype(np.int64).reshape(n, n)


def bce_loss(p: np.ndarray, y: np.ndarray, clamp: float = 1e-12) -> float:
    """Mean binary cross-entropy with clamped probabilities."""
    p = np.clip(p, clamp, 1.0 - clamp)
    return float(np.mean(-(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))))


def backward(model: MlpModel, x: np.ndarray, y: np.ndarray) -> tuple[list[np.ndarray], list[np.ndarray], float]:
    """Gradients of mean BCE over a batch; returns (dW, db, loss)."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    acts = _forward_pass(model, x)
    p = acts[-1]
    loss = bce_loss(p, y)
    # Mean over batch and output cells; sigmoid+BCE collapses to (p - y).
    scale = 1.0 / p.size
    delta = (p - y) * scale
    dw = [np.empty(0)] * model.n_layers
    db = [np.empty(0)] * model.n_layers
    for i in range(model.n_layers - 1, -1, -1):
        dw[i] = acts[i].T @ delta
        db[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ model.weights[i].T) * (acts[i] > 0.0)
    return dw, db, loss


@dataclass
class TrainConfig:
    batch_size: int = 1024
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    epochs: int = 30
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch size must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ValueError("Adam betas must lie in (0, 1)")


@dataclass
class AdamState:
    m_w: list[np.ndarray]
    v_w: list[np.ndarray]
    m_b: list[np.ndarray]
    v_b: list[np.ndarray]
    t: int = 0

    @classmethod
    def for_model(cls, model: MlpModel) -> "AdamState":
        return cls(
            m_w=[np.zeros_like(w) for w in model.weights],
            v_w=[np.zeros_like(w) for w in model.weights],
            m_b=[np.zeros_like(b) for b in model.biases],
            v_b=[np.zeros_like(b) for b in model.biases],
        )


def adam_step(model: MlpModel, dw: list[np.ndarray], db: list[np.ndarray],
              state: AdamState, cfg: TrainConfig) -> None:
    """One in-place Adam update with bias correction."""
    state.t += 1
    c1 = 1.0 - cfg.beta1 ** state.t
    c2 = 1.0 - cfg.beta2 ** state.t
    for i in range(model.n_layers):
        for param, grad, m, v in (
            (model.weights[i], dw[i], state.m_w[i], state.v_w[i]),
            (model.biases[i], db[i], state.m_b[i], state.v_b[i]),
        ):
            m *= cfg.beta1
            m += (1.0 - cfg.beta1) * grad
            v *= cfg.beta2
            v += (1.0 - cfg.beta2) * grad * grad
            param -= cfg.learning_rate * (m / c1) / (np.sqrt(v / c2) + cfg.eps)


@dataclass
class Dataset:
    inputs: np.ndarray  # (count, N^2), already normalized
    labels: np.ndarray  # (count, N^2) binary
    provenance: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.inputs.shape[0]


def generate_dataset(params: ChannelParams, cfg: gs.CodecConfig | None, count: int,
                     class_filter: str, seed: int, q: float = 0.5,
                     normalizer: float | None = None, budget_factor: int = 200) -> Dataset:
    """Sample (reads, stored bits) pairs through encode -> write -> read.

    ``class_filter`` AFFECTED_ONLY keeps only arrays the weight comparator
    flags as sneak-path-affected; the sampler gives up with
    :class:`FilterStarvationError` after ``budget_factor * count`` attempts.
    With ``cfg`` None the arrays are uncoded Bernoulli(q) data and the side
    information is the whole-array weight.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if class_filter not in (AFFECTED_ONLY, ALL):
        raise ValueError(f"unknown class filter {class_filter!r}")
    norm = 1.0 / params.r0 if normalizer is None else normalizer
    midpoint = ThresholdDetector.midpoint(params)
    tile = cfg.m if cfg is not None else params.n
    inputs = np.empty((count, params.n * params.n))
    labels = np.empty((count, params.n * params.n), dtype=np.int64)
    kept = 0
    budget = budget_factor * count
    for attempt in range(budget):
        data_rng = derive_rng(seed, attempt, STREAM_DATA)
        fail_rng = derive_rng(seed, attempt, STREAM_FAILURES)
        noise_rng = derive_rng(seed, attempt, STREAM_NOISE)
        if cfg is not None:
            payload = (data_rng.random(gs.payload_length(cfg, params.n)) < q).astype(np.int64)
            enc = gs.encode_array(payload, cfg, params.n)
            bits, weights = enc.bits, enc.weights
        else:
            bits = random_array(params.n, q, data_rng)
            weights = [int(bits.sum())]
        _, _, reads = transmit(bits, params, fail_rng, noise_rng)
        if class_filter == AFFECTED_ONLY:
            detected = midpoint.detect(reads)
            if not classify_array(detected, weights, tile).affected:
                continue
        inputs[kept] = reads.reshape(-1) * norm
        labels[kept] = bits.reshape(-1)
        kept += 1
        if kept == count:
            break
    else:
        raise FilterStarvationError(
            f"only {kept}/{count} arrays passed the {class_filter} filter "
            f"within {budget} attempts (p_f={params.p_f})"
        )
    return Dataset(
        inputs=inputs,
        labels=labels,
        provenance={
            "sigma": params.sigma, "p_f": params.p_f, "q": q, "seed": seed,
            "class_filter": class_filter, "coded": cfg is not None,
            "normalizer": norm,
        },
    )


def train(model: MlpModel, dataset: Dataset, cfg: TrainConfig) -> list[float]:
    """Mini-batch Adam training; returns the per-epoch mean loss trace."""
    if len(dataset) == 0:
        raise ValueError("dataset is empty")
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 1]))
    state = AdamState.for_model(model)
    trace = []
    n = len(dataset)
    for _epoch in range(cfg.epochs):
        order = rng.permutation(n)
        losses = []
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            dw, db, loss = backward(model, dataset.inputs[idx], dataset.labels[idx])
            if not np.isfinite(loss):
                raise FloatingPointError(f"non-finite training loss at step {state.t}")
            adam_step(model, dw, db, state, cfg)
            losses.append(loss)
        trace.append(float(np.mean(losses)))
    return trace


def save(model: MlpModel, path) -> None:
    """Versioned binary dump: magic, dims, row-major f64-LE parameters."""
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", model.n_layers))
        fh.write(struct.pack(f"<{len(model.dims)}I", *model.dims))
        for w, b in zip(model.weights, model.biases):
            fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(b, dtype="<f8").tobytes())
        fh.write(struct.pack("<d", model.normalizer))


def load(path) -> MlpModel:
    with open(path, "rb") as fh:
        if fh.read(len(MAGIC)) != MAGIC:
            raise ValueError(f"{path}: not a model file (bad magic)")
        (n_layers,) = struct.unpack("<I", fh.read(4))
        dims = list(struct.unpack(f"<{n_layers + 1}I", fh.read(4 * (n_layers + 1))))
        weights, biases = [], []
        for i in range(n_layers):
            w = np.frombuffer(fh.read(8 * dims[i] * dims[i + 1]), dtype="<f8")
            weights.append(w.reshape(dims[i], dims[i + 1]).copy())
            b = np.frombuffer(fh.read(8 * dims[i + 1]), dtype="<f8")
            biases.append(b.copy())
        (normalizer,) = struct.unpack("<d", fh.read(8))
    return MlpModel(dims=dims, weights=weights, biases=biases, normalizer=normalizer)
