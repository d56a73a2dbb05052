"""scikit-learn classifier that records a temporal self-ensemble while fitting."""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from . import acquisition
from .ensemble import DEFAULT_EMA_ALPHA, StudentEnsemble, build_teacher
from .exceptions import InvalidInputError
from .model import MlpSpec, init_model, predict_proba
from .trainer import TrainConfig, train

INIT_STREAM = 0
SHUFFLE_STREAM = 1


def derive_seed(*keys):
    """Deterministic 32-bit seed from a tuple of nonnegative integers."""
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1)[0])


class SnapshotEnsembleClassifier(ClassifierMixin, BaseEstimator):
    """MLP trained with SGD whose late-training snapshots act as students.

    After ``fit``, ``students_`` holds the models captured every
    ``snapshot_interval`` epochs past ``decay_epoch`` and ``teacher_`` the
    model built from them (equal-weight average by default). Predictions
    come from the final SGD iterate, ``model_``.

    Labels must already be integer class indices. ``n_classes`` fixes the
    output width, which matters when a small labeled set misses a class.
    """

    def __init__(self, hidden_layer_sizes=(64,), activation="relu",
                 n_classes=None, l0=0.1, gamma=1.0, decay_epoch=160,
                 snapshot_interval=10, epochs=200, momentum=0.9,
                 weight_decay=4e-4, batch_size=128, teacher="ewa",
                 ema_alpha=DEFAULT_EMA_ALPHA, random_state=0):
        self.hidden_layer_sizes = hidden_layer_sizes
        self.activation = activation
        self.n_classes = n_classes
        self.l0 = l0
        self.gamma = gamma
        self.decay_epoch = decay_epoch
        self.snapshot_interval = snapshot_interval
        self.epochs = epochs
        self.momentum = momentum
        self.weight_decay = weight_decay
        self.batch_size = batch_size
        self.teacher = teacher
        self.ema_alpha = ema_alpha
        self.random_state = random_state

    def _train_config(self, seed):
        return TrainConfig(
            l0=self.l0, gamma=self.gamma, decay_epoch=self.decay_epoch,
            snapshot_interval=self.snapshot_interval, epochs=self.epochs,
            momentum=self.momentum, weight_decay=self.weight_decay,
            batch_size=self.batch_size, seed=seed)

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        if not np.all(np.equal(np.mod(y, 1), 0)) or np.any(y < 0):
            raise InvalidInputError("labels must be nonnegative class indices")
        y = y.astype(np.int64)
        K = int(self.n_classes) if self.n_classes is not None else int(y.max()) + 1
        if np.any(y >= K):
            raise InvalidInputError(f"labels must lie in [0, {K})")
        K = max(K, 2)

        seed = 0 if self.random_state is None else int(self.random_state)
        spec = MlpSpec((X.shape[1], *self.hidden_layer_sizes, K),
                       self.activation)
        cfg = self._train_config(derive_seed(seed, SHUFFLE_STREAM))

        self.initial_model_ = init_model(spec, derive_seed(seed, INIT_STREAM))
        self.model_, snapshots = train(self.initial_model_, X, y, cfg)
        self.snapshot_epochs_ = snapshots.epochs_captured
        self.ensemble_ = StudentEnsemble.from_snapshots(snapshots)
        self.students_ = self.ensemble_.students
        self.teacher_ = build_teacher(self.ensemble_, self.teacher,
                                      self.ema_alpha)
        self.classes_ = np.arange(K)
        self.n_features_in_ = X.shape[1]
        return self

    def _check(self, X):
        check_is_fitted(self, "model_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise InvalidInputError(
                f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return X

    def predict_proba(self, X):
        X = self._check(X)
        return predict_proba(self.model_, X)

    def predict(self, X):
        return np.argmax(self.predict_proba(X), axis=1)

    def acquisition_scores(self, X, criterion="st-conal",
                           temperature=acquisition.DEFAULT_TEMPERATURE,
                           seed=None):
        """Per-row acquisition scores under ``criterion`` (name or Criterion)."""
        X = self._check(X)
        if isinstance(criterion, str):
            criterion = acquisition.Criterion(criterion, temperature)
        return acquisition.score_candidates(
            criterion, X, self.ensemble_, self.teacher_, seed)
