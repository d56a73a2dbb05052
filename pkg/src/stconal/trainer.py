"""Mini-batch SGD with a two-phase learning rate and snapshot capture."""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidInputError
from .model import loss_and_grad


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer and schedule settings.

    The learning rate is ``l0`` for epochs ``t < decay_epoch`` and
    ``gamma * l0`` afterwards. Once the decay epoch has passed, the weights
    are captured every ``snapshot_interval`` epochs.
    """

    l0: float = 0.1
    gamma: float = 1.0
    decay_epoch: int = 160
    snapshot_interval: int = 10
    epochs: int = 200
    momentum: float = 0.9
    weight_decay: float = 4e-4
    batch_size: int = 128
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.gamma <= 1:
            raise InvalidInputError("gamma must lie in (0, 1]")
        if not 0 < self.decay_epoch <= self.epochs:
            raise InvalidInputError("decay_epoch must lie in (0, epochs]")
        if self.snapshot_interval < 1:
            raise InvalidInputError("snapshot_interval must be >= 1")
        if self.epochs < self.decay_epoch + self.snapshot_interval:
            raise InvalidInputError(
                "epochs must be >= decay_epoch + snapshot_interval "
                "so at least one snapshot is taken")
        if self.l0 < 0 or self.momentum < 0 or self.weight_decay < 0:
            raise InvalidInputError(
                "l0, momentum and weight_decay must be nonnegative")
        if self.batch_size < 1:
            raise InvalidInputError("batch_size must be >= 1")

    @property
    def n_snapshots(self):
        return (self.epochs - self.decay_epoch) // self.snapshot_interval


@dataclass(frozen=True)
class SnapshotSet:
    students: tuple = field(default_factory=tuple)
    epochs_captured: tuple = field(default_factory=tuple)

    def __len__(self):
        return len(self.students)


def learning_rate(t, cfg):
    if t < 0:
        raise InvalidInputError("epoch index must be >= 0")
    return cfg.l0 if t < cfg.decay_epoch else cfg.gamma * cfg.l0


def snapshot_epochs(cfg):
    """Completed-epoch counts at which a student is captured.

    The model at exactly ``decay_epoch`` is not captured, so the first
    student comes ``snapshot_interval`` epochs after the decay point.
    """
    first = cfg.decay_epoch + cfg.snapshot_interval
    return list(range(first, cfg.epochs + 1, cfg.snapshot_interval))


def train(m, X, y, cfg):
    """Train a copy of ``m`` on ``(X, y)``.

    Uses Nesterov momentum with L2 weight decay folded into the gradient,
    reshuffling every epoch from ``cfg.seed``. Returns the final model and
    the students captured at ``snapshot_epochs(cfg)``.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n = X.shape[0] if X.ndim == 2 else 0
    if n == 0:
        raise InvalidInputError("cannot train on an empty labeled set")
    if y.shape[0] != n:
        raise InvalidInputError("features and labels differ in length")

    rng = np.random.default_rng(cfg.seed)
    capture = set(snapshot_epochs(cfg))
    w = np.array(m.weights)
    velocity = np.zeros_like(w)
    mu, wd = cfg.momentum, cfg.weight_decay
    students, captured = [], []

    for t in range(cfg.epochs):
        lr = learning_rate(t, cfg)
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            _, g = loss_and_grad(m.with_weights(w), X[idx], y[idx])
            if wd:
                g = g + wd * w
            if mu:
                velocity = mu * velocity + g
                g = g + mu * velocity
            w = w - lr * g
        if t + 1 in capture:
            students.append(m.with_weights(w))
            captured.append(t + 1)

    return m.with_weights(w), SnapshotSet(tuple(students), tuple(captured))
