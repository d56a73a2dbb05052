"""Synthetic datasets, class-imbalance construction, splitting and CSV I/O.

CSV layout: a header ``f0,f1,...,f{d-1},label`` followed by one sample per
line. Features are decimal literals, the label is a base-10 integer, and
the class count is inferred as ``max(label) + 1``.
"""

import csv
import math
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .exceptions import DatasetParseError, GenerationError, InvalidInputError


@dataclass(frozen=True, eq=False)
class Dataset:
    X: np.ndarray
    y: np.ndarray
    n_classes: int

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.int64).reshape(-1)
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise InvalidInputError("X must be 2-D with one row per label")
        if X.shape[0] == 0:
            raise InvalidInputError("dataset is empty")
        if not np.all(np.isfinite(X)):
            raise InvalidInputError("features must be finite")
        K = int(self.n_classes)
        if np.any((y < 0) | (y >= K)):
            raise InvalidInputError(f"labels must lie in [0, {K})")
        missing = np.flatnonzero(np.bincount(y, minlength=K) == 0)
        if missing.size:
            raise InvalidInputError(f"classes {missing.tolist()} have no samples")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "n_classes", K)

    def __len__(self):
        return self.y.shape[0]

    @property
    def class_counts(self):
        return np.bincount(self.y, minlength=self.n_classes)

    def subset(self, idx):
        idx = np.asarray(idx, dtype=np.int64)
        return Dataset(self.X[idx], self.y[idx], self.n_classes)


@dataclass(frozen=True)
class ImbalanceProfile:
    kind: str
    ratio: float
    n_max: int

    def __post_init__(self):
        if self.kind not in ("step", "longtail"):
            raise InvalidInputError(f"unknown imbalance kind {self.kind!r}")
        if self.ratio < 1:
            raise InvalidInputError("imbalance ratio must be >= 1")
        if self.n_max < self.ratio:
            raise InvalidInputError("n_max must be >= ratio")

    def class_sizes(self, n_classes):
        """Target per-class counts under this profile."""
        K = n_classes
        if self.kind == "step":
            if K % 2:
                raise InvalidInputError("step imbalance needs an even class count")
            small = max(1, int(math.floor(self.n_max / self.ratio + 0.5)))
            return [small] * (K // 2) + [int(self.n_max)] * (K // 2)
        # floor, not nearest: only floor gives 12,406 for K=10, 5000, 100
        return [max(1, int(self.n_max * self.ratio ** (-k / (K - 1))))
                for k in range(K)]


def gen_gaussian_blobs(n_classes, n_per_class, dim, spread=1.0,
                       class_separation=3.0, seed=0, box=None,
                       max_retries=1000):
    """Isotropic Gaussian classes around well-separated random centers.

    Centers are drawn uniformly from ``[-box, box]^dim`` (default
    ``box = class_separation * n_classes ** (1 / dim)``) and rejected until
    every pair is at least ``class_separation`` apart.
    """
    if n_classes < 2 or n_per_class < 1 or dim < 1:
        raise InvalidInputError("need n_classes >= 2, n_per_class >= 1, dim >= 1")
    if spread < 0:
        raise InvalidInputError("spread must be nonnegative")
    rng = np.random.default_rng(seed)
    half = class_separation * n_classes ** (1.0 / dim) if box is None else box
    centers = []
    for _ in range(n_classes):
        for _ in range(max_retries):
            c = rng.uniform(-half, half, size=dim)
            if all(np.linalg.norm(c - o) >= class_separation for o in centers):
                centers.append(c)
                break
        else:
            raise GenerationError(
                f"could not place {n_classes} centers {class_separation} apart "
                f"in {dim} dimension(s) after {max_retries} tries")
    centers = np.array(centers)
    y = np.repeat(np.arange(n_classes), n_per_class)
    X = centers[y] + spread * rng.standard_normal((y.size, dim))
    return Dataset(X, y, n_classes)


def _subsample_to(ds, sizes, seed):
    rng = np.random.default_rng(seed)
    keep = []
    for k, want in enumerate(sizes):
        idx = np.flatnonzero(ds.y == k)
        if idx.size < want:
            raise InvalidInputError(
                f"class {k} has {idx.size} samples, {want} needed")
        keep.append(np.sort(rng.choice(idx, size=want, replace=False)))
    return ds.subset(np.concatenate(keep))


def apply_step_imbalance(ds, profile, seed=0):
    """Keep ``n_max / ratio`` samples of the first half of the classes and
    ``n_max`` of the second half."""
    if profile.kind != "step":
        raise InvalidInputError("profile kind must be 'step'")
    return _subsample_to(ds, profile.class_sizes(ds.n_classes), seed)


def apply_longtail_imbalance(ds, profile, seed=0):
    """Class ``k`` keeps ``floor(n_max * ratio ** (-k / (K - 1)))`` samples."""
    if profile.kind != "longtail":
        raise InvalidInputError("profile kind must be 'longtail'")
    return _subsample_to(ds, profile.class_sizes(ds.n_classes), seed)


def apply_imbalance(ds, profile, seed=0):
    if profile.kind == "step":
        return apply_step_imbalance(ds, profile, seed)
    return apply_longtail_imbalance(ds, profile, seed)


def split_train_test(ds, test_fraction, seed=0):
    """Stratified split; each class contributes at least one row to each side."""
    if not 0 < test_fraction < 1:
        raise InvalidInputError("test_fraction must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    for k in range(ds.n_classes):
        idx = np.flatnonzero(ds.y == k)
        if idx.size < 2:
            raise InvalidInputError(f"class {k} has fewer than 2 samples")
        n_test = min(max(int(round(test_fraction * idx.size)), 1), idx.size - 1)
        idx = rng.permutation(idx)
        test_idx.append(idx[:n_test])
        train_idx.append(idx[n_test:])
    return (ds.subset(np.sort(np.concatenate(train_idx))),
            ds.subset(np.sort(np.concatenate(test_idx))))


def save_csv(ds, path):
    """Write ``ds`` atomically; floats use shortest round-trip repr."""
    d = ds.X.shape[1]
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([f"f{i}" for i in range(d)] + ["label"])
            for row, label in zip(ds.X, ds.y):
                w.writerow([repr(float(v)) for v in row] + [int(label)])
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        rows = csv.reader(fh)
        header = next(rows, None)
        if not header:
            raise DatasetParseError("missing header", line=1)
        d = len(header) - 1
        expected = [f"f{i}" for i in range(d)] + ["label"]
        if d < 1 or [h.strip() for h in header] != expected:
            raise DatasetParseError(
                f"header must be f0,...,f{{d-1}},label; got {','.join(header)}",
                line=1)
        X, y = [], []
        for lineno, row in enumerate(rows, start=2):
            if not row:
                continue
            if len(row) != d + 1:
                raise DatasetParseError(
                    f"expected {d + 1} fields, got {len(row)}", line=lineno)
            try:
                feats = [float(v) for v in row[:-1]]
            except ValueError as exc:
                raise DatasetParseError(f"non-numeric feature: {exc}",
                                        line=lineno) from None
            if not all(math.isfinite(v) for v in feats):
                raise DatasetParseError("non-finite feature", line=lineno)
            try:
                label = int(row[-1].strip())
            except ValueError:
                raise DatasetParseError(f"label {row[-1]!r} is not an integer",
                                        line=lineno) from None
            if label < 0:
                raise DatasetParseError(f"negative label {label}", line=lineno)
            X.append(feats)
            y.append(label)
    if not y:
        raise DatasetParseError("dataset has no samples")
    y = np.array(y, dtype=np.int64)
    K = int(y.max()) + 1
    missing = np.flatnonzero(np.bincount(y, minlength=K) == 0)
    if missing.size:
        raise DatasetParseError(
            f"labels out of range: classes {missing.tolist()} below the max "
            f"label {K - 1} have no samples")
    if K < 2:
        raise DatasetParseError("need at least two classes")
    return Dataset(np.array(X, dtype=np.float64), y, K)
