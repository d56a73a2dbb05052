"""Pool-based active learning loop.

Each round refits a fresh clone of the configured estimator on the labeled
pool, scores a random candidate subset of the unlabeled pool, and moves the
top-``budget`` candidates into the labeled pool after querying the oracle.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import clone

from .acquisition import Criterion, sample_candidate_subset, select_top_b
from .estimator import SnapshotEnsembleClassifier, derive_seed
from .exceptions import BudgetExhaustedError, InvalidInputError

log = logging.getLogger(__name__)

# stream ids mixed into per-round seeds
POOL_STREAM = 0
FIT_STREAM = 1
SUBSET_STREAM = 2
SCORE_STREAM = 3


def round_seed(seed, j):
    return derive_seed(seed, j)


def stream_seed(seed, j, stream):
    """Seed for one purpose (fit, subset draw, random scores) in round ``j``."""
    return derive_seed(round_seed(seed, j), stream)


class Oracle:
    """Ground-truth labels, revealed at most once per index."""

    def __init__(self, labels):
        self.labels = np.asarray(labels, dtype=np.int64).copy()
        self.labels.flags.writeable = False
        self._revealed = np.zeros(self.labels.shape[0], dtype=bool)

    def __len__(self):
        return self.labels.shape[0]

    def annotate(self, indices):
        idx = np.asarray(list(indices), dtype=np.int64).reshape(-1)
        if idx.size == 0:
            return []
        if np.any((idx < 0) | (idx >= len(self))):
            raise InvalidInputError("index out of range")
        if np.unique(idx).size != idx.size:
            raise InvalidInputError("duplicate indices in annotation request")
        if np.any(self._revealed[idx]):
            bad = idx[self._revealed[idx]].tolist()
            raise InvalidInputError(f"indices already labeled: {bad}")
        self._revealed[idx] = True
        return [(int(i), int(self.labels[i])) for i in idx]


def annotate(oracle, indices):
    return oracle.annotate(indices)


@dataclass(frozen=True)
class ALState:
    round: int
    labeled: np.ndarray
    unlabeled: np.ndarray

    def advance(self, acquired):
        acquired = np.asarray(acquired, dtype=np.int64)
        if not np.all(np.isin(acquired, self.unlabeled)):
            raise InvalidInputError("acquired indices must be unlabeled")
        return ALState(
            self.round + 1,
            np.union1d(self.labeled, acquired),
            np.setdiff1d(self.unlabeled, acquired))


def init_pools(dataset, initial_labeled, seed):
    """Split the pool into labeled and unlabeled parts and build the oracle.

    ``initial_labeled`` is a count (drawn uniformly from ``seed``) or an
    explicit list of indices.
    """
    n = len(dataset)
    if np.ndim(initial_labeled) == 0:
        count = int(initial_labeled)
        if not 0 <= count <= n:
            raise InvalidInputError(
                f"initial_labeled={count} exceeds pool size {n}")
        rng = np.random.default_rng(seed)
        labeled = np.sort(rng.choice(n, size=count, replace=False))
    else:
        labeled = np.unique(np.asarray(initial_labeled, dtype=np.int64))
        if labeled.size != len(initial_labeled):
            raise InvalidInputError("initial_labeled has duplicates")
        if labeled.size and (labeled[0] < 0 or labeled[-1] >= n):
            raise InvalidInputError("initial_labeled index out of range")
    state = ALState(1, labeled, np.setdiff1d(np.arange(n), labeled))
    return state, Oracle(dataset.y)


@dataclass(frozen=True)
class ALConfig:
    rounds: int
    budget: int
    subset_size: int
    criterion: Criterion = field(default_factory=lambda: Criterion("st-conal"))
    estimator: SnapshotEnsembleClassifier = field(
        default_factory=SnapshotEnsembleClassifier)
    initial_labeled: object = 40
    seed: int = 0

    def __post_init__(self):
        if self.rounds < 1:
            raise InvalidInputError("rounds must be >= 1")
        if self.budget < 1:
            raise InvalidInputError("budget must be >= 1")
        if self.subset_size < self.budget:
            raise InvalidInputError("subset_size must be >= budget")


@dataclass
class ALResult:
    curve: list
    acquired: list
    candidates: list
    final_model: SnapshotEnsembleClassifier
    checkpoint: dict = None


def run_active_learning(dataset, test_set, cfg, scorer=None):
    """Run ``cfg.rounds`` acquisition rounds and a final retrain.

    ``scorer(estimator, X, indices)``, when given, replaces the configured
    criterion and must return one score per candidate row.

    The learning curve holds one ``(labeled_count, test_accuracy)`` point per
    round, measured before acquisition, plus the post-loop point.
    ``checkpoint`` keeps the last round's fitted estimator, labeled set and
    candidate subset for offline analysis.
    """
    state, oracle = init_pools(dataset, cfg.initial_labeled,
                               stream_seed(cfg.seed, 0, POOL_STREAM))
    if cfg.budget * cfg.rounds > state.unlabeled.size:
        raise BudgetExhaustedError(
            f"{cfg.rounds} rounds of {cfg.budget} need "
            f"{cfg.budget * cfg.rounds} unlabeled samples, "
            f"pool has {state.unlabeled.size}")
    known = np.full(len(dataset), -1, dtype=np.int64)
    for i, label in oracle.annotate(state.labeled):
        known[i] = label

    curve, acquired_log, candidates_log = [], [], []
    checkpoint = None

    def fit(j):
        est = clone(cfg.estimator).set_params(
            n_classes=dataset.n_classes,
            random_state=stream_seed(cfg.seed, j, FIT_STREAM))
        if state.labeled.size == 0:
            raise InvalidInputError("labeled pool is empty")
        return est.fit(dataset.X[state.labeled], known[state.labeled])

    for j in range(1, cfg.rounds + 1):
        if cfg.budget > state.unlabeled.size:
            raise BudgetExhaustedError(
                f"round {j}: budget {cfg.budget} exceeds the "
                f"{state.unlabeled.size} remaining unlabeled samples")
        est = fit(j)
        acc = float(est.score(test_set.X, test_set.y))
        curve.append((int(state.labeled.size), acc))

        cands = sample_candidate_subset(
            state.unlabeled, cfg.subset_size,
            stream_seed(cfg.seed, j, SUBSET_STREAM))
        Xc = dataset.X[cands]
        if scorer is not None:
            scores = np.asarray(scorer(est, Xc, cands), dtype=np.float64)
        else:
            scores = est.acquisition_scores(
                Xc, cfg.criterion, seed=stream_seed(cfg.seed, j, SCORE_STREAM))
        picked = select_top_b(cands, scores, cfg.budget)
        for i, label in oracle.annotate(picked):
            known[i] = label

        checkpoint = {"estimator": est, "labeled": state.labeled.copy(),
                      "candidates": cands.copy(), "round": j}
        acquired_log.append([int(i) for i in picked])
        candidates_log.append(cands)
        state = state.advance(picked)
        log.debug("round %d: %d labeled, acc %.4f", j, curve[-1][0], acc)

    est = fit(cfg.rounds + 1)
    curve.append((int(state.labeled.size),
                  float(est.score(test_set.X, test_set.y))))
    return ALResult(curve, acquired_log, candidates_log, est, checkpoint)
