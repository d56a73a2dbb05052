"""Fully connected softmax classifier with analytic gradients.

Parameters live in one flat float64 vector, laid out layer by layer: the
``(n_in, n_out)`` weight matrix in row-major order followed by the
``n_out`` biases. Snapshotting, averaging and EMA all work on this vector.
"""

import json
from dataclasses import dataclass

import numpy as np

from .core import softmax
from .exceptions import InvalidInputError

ACTIVATIONS = ("relu", "tanh")


@dataclass(frozen=True)
class MlpSpec:
    layer_sizes: tuple
    activation: str = "relu"

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.layer_sizes)
        if len(sizes) < 2 or any(s < 1 for s in sizes):
            raise InvalidInputError(
                "layer_sizes needs at least two positive entries")
        if sizes[-1] < 2:
            raise InvalidInputError("the output layer needs at least 2 classes")
        if self.activation not in ACTIVATIONS:
            raise InvalidInputError(f"unknown activation {self.activation!r}")
        object.__setattr__(self, "layer_sizes", sizes)

    @property
    def n_features(self):
        return self.layer_sizes[0]

    @property
    def n_classes(self):
        return self.layer_sizes[-1]

    @property
    def n_params(self):
        return sum(a * b + b for a, b in zip(self.layer_sizes[:-1],
                                             self.layer_sizes[1:]))

    def layer_slices(self):
        """Yield ``(w_slice, b_slice, n_in, n_out)`` for each layer."""
        pos = 0
        for n_in, n_out in zip(self.layer_sizes[:-1], self.layer_sizes[1:]):
            w = slice(pos, pos + n_in * n_out)
            pos += n_in * n_out
            b = slice(pos, pos + n_out)
            pos += n_out
            yield w, b, n_in, n_out


@dataclass(frozen=True, eq=False)
class Model:
    """An immutable (spec, weights) pair."""

    spec: MlpSpec
    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64).reshape(-1)
        if w.shape[0] != self.spec.n_params:
            raise InvalidInputError(
                f"expected {self.spec.n_params} weights, got {w.shape[0]}")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    def with_weights(self, weights):
        return Model(self.spec, weights)

    def layers(self):
        """List of ``(W, b)`` views into the flat weight vector."""
        return [(self.weights[ws].reshape(n_in, n_out), self.weights[bs])
                for ws, bs, n_in, n_out in self.spec.layer_slices()]


def init_model(spec, seed):
    """He-initialized weights, zero biases; deterministic in ``seed``."""
    rng = np.random.default_rng(seed)
    w = np.zeros(spec.n_params)
    for ws, _, n_in, n_out in spec.layer_slices():
        w[ws] = rng.normal(0.0, np.sqrt(2.0 / n_in), size=n_in * n_out)
    return Model(spec, w)


def _activate(a, kind):
    if kind == "relu":
        return np.maximum(a, 0.0)
    return np.tanh(a)


def _check_features(m, x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim not in (1, 2) or x.shape[-1] != m.spec.n_features:
        raise InvalidInputError(
            f"expected {m.spec.n_features} features, got shape {x.shape}")
    return x


def forward(m, x):
    """Logits for one feature vector or a 2-D batch of rows."""
    x = _check_features(m, x)
    h = x
    layers = m.layers()
    for i, (W, b) in enumerate(layers):
        h = h @ W + b
        if i < len(layers) - 1:
            h = _activate(h, m.spec.activation)
    return h


def predict_proba(m, x):
    return softmax(forward(m, x))


def loss_and_grad(m, X, y):
    """Mean cross-entropy over the batch and its gradient w.r.t. weights.

    The gradient is a flat vector in the same layout as ``m.weights``.
    """
    X = _check_features(m, X)
    if X.ndim == 1:
        X = X[None, :]
    y = np.asarray(y, dtype=np.int64).reshape(-1)
    n = X.shape[0]
    if n == 0:
        raise InvalidInputError("empty batch")
    if y.shape[0] != n:
        raise InvalidInputError("features and labels differ in length")
    K = m.spec.n_classes
    if np.any((y < 0) | (y >= K)):
        raise InvalidInputError(f"labels must lie in [0, {K})")

    layers = m.layers()
    acts = [X]
    pre = []
    h = X
    for i, (W, b) in enumerate(layers):
        a = h @ W + b
        pre.append(a)
        h = a if i == len(layers) - 1 else _activate(a, m.spec.activation)
        acts.append(h)

    logits = acts[-1]
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1))
    log_p = shifted - log_z[:, None]
    loss = -log_p[np.arange(n), y].mean()

    delta = np.exp(log_p)
    delta[np.arange(n), y] -= 1.0
    delta /= n

    grad = np.empty_like(m.weights)
    slices = list(m.spec.layer_slices())
    for i in range(len(layers) - 1, -1, -1):
        ws, bs, _, _ = slices[i]
        grad[ws] = (acts[i].T @ delta).reshape(-1)
        grad[bs] = delta.sum(axis=0)
        if i > 0:
            delta = delta @ layers[i][0].T
            if m.spec.activation == "relu":
                delta = delta * (pre[i - 1] > 0)
            else:
                delta = delta * (1.0 - acts[i] ** 2)
    return float(loss), grad


def accuracy(m, X, y):
    pred = np.argmax(forward(m, X), axis=-1)
    return float(np.mean(pred == np.asarray(y)))


def model_to_dict(m):
    return {
        "layer_sizes": list(m.spec.layer_sizes),
        "activation": m.spec.activation,
        "weights": [float(v) for v in m.weights],
    }


def model_from_dict(d):
    try:
        spec = MlpSpec(tuple(d["layer_sizes"]), d["activation"])
        return Model(spec, np.asarray(d["weights"], dtype=np.float64))
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"malformed model record: {exc}") from exc


def save_model(m, path):
    """Write ``m`` as JSON; floats use shortest round-trip repr."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(m), fh)
        fh.write("\n")


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
