"""Acquisition scores and top-b selection over a candidate subset.

Score functions take a single feature vector (returning a float) or a 2-D
batch (returning an array with one score per row). Larger scores mean a
sample is more worth labeling.
"""

from dataclasses import dataclass

import numpy as np

from .core import entropy, kl_divergence, sharpen
from .exceptions import InvalidInputError
from .model import forward, predict_proba

DEFAULT_TEMPERATURE = 0.7

CRITERIA = ("st-conal", "entropy", "least-confidence", "variation-ratio",
            "random")


@dataclass(frozen=True)
class Criterion:
    name: str
    temperature: float = DEFAULT_TEMPERATURE

    def __post_init__(self):
        if self.name not in CRITERIA:
            raise InvalidInputError(
                f"unknown criterion {self.name!r}; expected one of {CRITERIA}")
        if self.name == "st-conal" and not self.temperature > 0:
            raise InvalidInputError("st-conal needs a positive temperature")


def _students(students):
    models = getattr(students, "students", students)
    models = tuple(models)
    if not models:
        raise InvalidInputError("need at least one student")
    return models


def _teacher_model(teacher):
    return getattr(teacher, "model", teacher)


def _scalar_if_single(x, scores):
    if np.ndim(x) == 1:
        return float(np.asarray(scores).reshape(-1)[0])
    return scores


def st_conal_score(x, students, teacher, temperature=DEFAULT_TEMPERATURE):
    """Mean KL from the sharpened teacher prediction to each student's."""
    models = _students(students)
    target = sharpen(predict_proba(_teacher_model(teacher), x), temperature)
    total = 0.0
    for s in models:
        total = total + kl_divergence(target, predict_proba(s, x))
    return _scalar_if_single(x, total / len(models))


def entropy_score(x, teacher):
    return _scalar_if_single(x, entropy(predict_proba(_teacher_model(teacher), x)))


def least_confidence_score(x, teacher):
    p = predict_proba(_teacher_model(teacher), x)
    return _scalar_if_single(x, 1.0 - p.max(axis=-1))


def variation_ratio_score(x, students):
    """One minus the share of students voting for the modal class.

    Both the per-student argmax and the modal class break ties toward the
    smallest class index.
    """
    models = _students(students)
    votes = np.stack([np.atleast_2d(forward(s, x)).argmax(axis=1)
                      for s in models], axis=1)
    K = models[0].spec.n_classes
    counts = np.apply_along_axis(np.bincount, 1, votes, minlength=K)
    modal = counts.max(axis=1)
    return _scalar_if_single(x, 1.0 - modal / len(models))


def random_score(X, seed):
    n = np.atleast_2d(X).shape[0]
    return np.random.default_rng(seed).random(n)


def score_candidates(criterion, X, students, teacher, seed=None):
    """Score every row of ``X`` under ``criterion``; returns a 1-D array."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    name = criterion.name
    if name == "st-conal":
        return st_conal_score(X, students, teacher, criterion.temperature)
    if name == "entropy":
        return entropy_score(X, teacher)
    if name == "least-confidence":
        return least_confidence_score(X, teacher)
    if name == "variation-ratio":
        return variation_ratio_score(X, students)
    return random_score(X, seed)


def sample_candidate_subset(unlabeled_indices, size, seed):
    """Draw ``min(size, pool)`` distinct indices uniformly without replacement."""
    pool = np.asarray(list(unlabeled_indices), dtype=np.int64)
    if pool.size == 0:
        raise InvalidInputError("unlabeled pool is empty")
    if size < 1:
        raise InvalidInputError("subset size must be >= 1")
    rng = np.random.default_rng(seed)
    return rng.permutation(pool)[:min(size, pool.size)]


def select_top_b(indices, scores, b):
    """Indices of the ``b`` highest scores.

    Ties go to the smaller index. The result is ordered by descending score,
    then ascending index. Uses a partial sort, so the cost is dominated by
    a linear-time partition rather than a full sort.
    """
    if b < 1:
        raise InvalidInputError("budget must be >= 1")
    indices = np.asarray(indices, dtype=np.int64).reshape(-1)
    scores = np.asarray(scores, dtype=np.float64).reshape(-1)
    if indices.shape != scores.shape:
        raise InvalidInputError("indices and scores differ in length")
    if np.any(np.isnan(scores)):
        raise InvalidInputError("scores contain NaN")
    n = scores.size
    if n == 0:
        return np.empty(0, dtype=np.int64)
    k = min(b, n)
    if k < n:
        kth = -np.partition(-scores, k - 1)[k - 1]
        above = np.flatnonzero(scores > kth)
        tied = np.flatnonzero(scores == kth)
        tied = tied[np.argsort(indices[tied], kind="stable")][:k - above.size]
        keep = np.concatenate([above, tied])
    else:
        keep = np.arange(n)
    order = np.lexsort((indices[keep], -scores[keep]))
    return indices[keep][order]
