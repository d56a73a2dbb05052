"""Seeded multi-criterion experiments, summaries, sweeps and analyses.

A run directory looks like::

    <output_dir>/
      config.json                       resolved copy of the experiment config
      runs/<criterion>__seed<s>.json            run record
      runs/<criterion>__seed<s>.curve.csv       labeled_count,accuracy
      runs/<criterion>__seed<s>.checkpoint.json last acquisition round models
      runs/<criterion>__seed<s>.failed          present only if the run failed
      summary.json, summary.csv

Checkpoint files store models as ``{"layer_sizes", "activation",
"weights"}`` objects, the weights being the flat parameter vector.
"""

import copy
import json
import logging
import math
import os
import tempfile
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .acquisition import (CRITERIA, DEFAULT_TEMPERATURE, Criterion,
                          entropy_score, select_top_b, st_conal_score)
from .datasets import (ImbalanceProfile, apply_imbalance, gen_gaussian_blobs,
                       load_csv, split_train_test)
from .ensemble import DEFAULT_EMA_ALPHA, StudentEnsemble, Teacher
from .estimator import SnapshotEnsembleClassifier
from .exceptions import ConfigError, InvalidInputError
from .model import model_from_dict, model_to_dict, predict_proba
from .pool import ALConfig, run_active_learning
from .trainer import TrainConfig

log = logging.getLogger(__name__)

WORKERS_ENV = "STCONAL_WORKERS"
SWEEP_AXES = ("b", "q", "t", "teacher")


# ---------------------------------------------------------------- config

def _require(d, key, where, kind=None, check=None, msg=None, default=...):
    if key not in d:
        if default is ...:
            raise ConfigError(f"{where}.{key}", "missing required field")
        return default
    v = d[key]
    if kind is not None and (not isinstance(v, kind) or isinstance(v, bool)):
        raise ConfigError(f"{where}.{key}", f"wrong type: {v!r}")
    if check is not None and not check(v):
        raise ConfigError(f"{where}.{key}", msg or f"invalid value {v!r}")
    return v


_NUM = (int, float)


@dataclass
class ExperimentConfig:
    dataset: dict
    model: dict
    train: dict
    al: dict
    criteria: list
    seeds: list
    output_dir: str
    sweep: dict = field(default_factory=dict)
    base_dir: str = "."

    @classmethod
    def from_dict(cls, raw, base_dir="."):
        if not isinstance(raw, dict):
            raise ConfigError("<root>", "config must be a JSON object")
        for key in ("dataset", "al", "criteria", "seeds", "output_dir"):
            if key not in raw:
                raise ConfigError(key, "missing required field")
        cfg = cls(
            dataset=dict(raw["dataset"]) if isinstance(raw["dataset"], dict) else raw["dataset"],
            model=dict(raw.get("model", {})), train=dict(raw.get("train", {})),
            al=dict(raw["al"]) if isinstance(raw["al"], dict) else raw["al"],
            criteria=raw["criteria"], seeds=raw["seeds"],
            output_dir=raw["output_dir"], sweep=dict(raw.get("sweep", {})),
            base_dir=str(base_dir))
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path):
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError("<file>", f"not valid JSON: {exc}") from None
        return cls.from_dict(raw, base_dir=path.parent)

    def to_dict(self, absolute=False):
        dataset = dict(self.dataset)
        output_dir = self.output_dir
        if absolute:
            for key in ("csv", "test_csv"):
                if key in dataset:
                    dataset[key] = str(self.resolve(dataset[key]).resolve())
            output_dir = str(self.out_path.resolve())
        return {"dataset": dataset, "model": self.model,
                "train": self.train, "al": self.al,
                "criteria": list(self.criteria), "seeds": list(self.seeds),
                "output_dir": output_dir, "sweep": self.sweep}

    def resolve(self, p):
        p = Path(p)
        return p if p.is_absolute() else Path(self.base_dir) / p

    @property
    def out_path(self):
        return self.resolve(self.output_dir)

    def validate(self):
        if not isinstance(self.dataset, dict):
            raise ConfigError("dataset", "must be an object")
        ds = self.dataset
        if "csv" in ds:
            _require(ds, "csv", "dataset", str)
            if "test_csv" not in ds:
                _require(ds, "test_fraction", "dataset", _NUM,
                         lambda v: 0 < v < 1, "must lie in (0, 1)")
        else:
            _require(ds, "generator", "dataset", str,
                     lambda v: v == "blobs", "only 'blobs' is supported")
            for key in ("n_classes", "n_per_class", "dim"):
                _require(ds, key, "dataset", int, lambda v: v >= 1,
                         "must be a positive integer")
            _require(ds, "spread", "dataset", _NUM, lambda v: v >= 0,
                     "must be >= 0", default=1.0)
            _require(ds, "test_fraction", "dataset", _NUM,
                     lambda v: 0 < v < 1, "must lie in (0, 1)", default=0.2)
        imb = ds.get("imbalance")
        if imb is not None:
            if not isinstance(imb, dict):
                raise ConfigError("dataset.imbalance", "must be an object or null")
            _require(imb, "kind", "dataset.imbalance", str,
                     lambda v: v in ("step", "longtail"),
                     "must be 'step' or 'longtail'")
            _require(imb, "ratio", "dataset.imbalance", _NUM, lambda v: v >= 1,
                     "must be >= 1")
            _require(imb, "n_max", "dataset.imbalance", int, lambda v: v >= 1,
                     "must be a positive integer")

        if not isinstance(self.al, dict):
            raise ConfigError("al", "must be an object")
        _require(self.al, "rounds", "al", int, lambda v: v >= 1, "must be >= 1")
        _require(self.al, "budget", "al", int, lambda v: v >= 1, "must be >= 1")
        _require(self.al, "subset_size", "al", int, lambda v: v >= 1,
                 "must be >= 1")
        init = _require(self.al, "initial_labeled", "al")
        if not (isinstance(init, int) and init >= 0 or isinstance(init, list)):
            raise ConfigError("al.initial_labeled",
                              "must be a count or a list of indices")
        _require(self.al, "temperature", "al", _NUM, lambda v: v > 0,
                 "must be > 0", default=DEFAULT_TEMPERATURE)
        _require(self.al, "teacher", "al", str, lambda v: v in ("ewa", "ema"),
                 "must be 'ewa' or 'ema'", default="ewa")
        _require(self.al, "ema_alpha", "al", _NUM, lambda v: 0 <= v <= 1,
                 "must lie in [0, 1]", default=DEFAULT_EMA_ALPHA)

        if not isinstance(self.criteria, list) or not self.criteria:
            raise ConfigError("criteria", "must be a non-empty list")
        for c in self.criteria:
            if c not in CRITERIA:
                raise ConfigError("criteria", f"unknown criterion {c!r}; "
                                  f"expected one of {list(CRITERIA)}")
        if len(set(self.criteria)) != len(self.criteria):
            raise ConfigError("criteria", "duplicate criterion")
        if (not isinstance(self.seeds, list) or not self.seeds
                or not all(isinstance(s, int) and not isinstance(s, bool)
                           and s >= 0 for s in self.seeds)):
            raise ConfigError("seeds", "must be a non-empty list of "
                              "nonnegative integers")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("seeds", "duplicate seed")
        if not isinstance(self.output_dir, str) or not self.output_dir:
            raise ConfigError("output_dir", "must be a non-empty string")

        try:
            self.train_config()
        except InvalidInputError as exc:
            raise ConfigError("train", str(exc)) from None
        try:
            self.estimator()
        except (InvalidInputError, TypeError) as exc:
            raise ConfigError("model", str(exc)) from None
        try:
            self.al_config(self.criteria[0], self.seeds[0])
        except InvalidInputError as exc:
            raise ConfigError("al", str(exc)) from None
        for axis, values in self.sweep.items():
            if axis not in SWEEP_AXES:
                raise ConfigError("sweep", f"unknown axis {axis!r}")
            if not isinstance(values, list) or not values:
                raise ConfigError(f"sweep.{axis}", "must be a non-empty list")

    def train_config(self):
        allowed = {"l0", "gamma", "decay_epoch", "snapshot_interval", "epochs",
                   "momentum", "weight_decay", "batch_size"}
        unknown = set(self.train) - allowed
        if unknown:
            raise InvalidInputError(f"unknown fields {sorted(unknown)}")
        return TrainConfig(**self.train)

    def estimator(self):
        m = dict(self.model)
        hidden = tuple(m.pop("hidden_layer_sizes", (64,)))
        activation = m.pop("activation", "relu")
        if m:
            raise InvalidInputError(f"unknown fields {sorted(m)}")
        return SnapshotEnsembleClassifier(
            hidden_layer_sizes=hidden, activation=activation,
            teacher=self.al.get("teacher", "ewa"),
            ema_alpha=self.al.get("ema_alpha", DEFAULT_EMA_ALPHA),
            **self.train)

    def al_config(self, criterion, seed):
        init = self.al["initial_labeled"]
        return ALConfig(
            rounds=self.al["rounds"], budget=self.al["budget"],
            subset_size=self.al["subset_size"],
            criterion=Criterion(criterion,
                                self.al.get("temperature", DEFAULT_TEMPERATURE)),
            estimator=self.estimator(),
            initial_labeled=init if isinstance(init, int) else list(init),
            seed=seed)


def build_datasets(cfg):
    """Materialize ``(pool, test)`` datasets from the config."""
    ds = cfg.dataset
    seed = ds.get("seed", 0)
    if "csv" in ds:
        data = load_csv(cfg.resolve(ds["csv"]))
        test = load_csv(cfg.resolve(ds["test_csv"])) if "test_csv" in ds else None
    else:
        data = gen_gaussian_blobs(
            ds["n_classes"], ds["n_per_class"], ds["dim"],
            spread=ds.get("spread", 1.0),
            class_separation=ds.get("class_separation", 3.0), seed=seed)
        test = None
    if test is None:
        data, test = split_train_test(data, ds.get("test_fraction", 0.2), seed)
    imb = ds.get("imbalance")
    if imb is not None:
        data = apply_imbalance(
            data, ImbalanceProfile(imb["kind"], imb["ratio"], imb["n_max"]), seed)
    return data, test


# ---------------------------------------------------------------- records

def write_atomic(path, text):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dumps(obj):
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def run_name(criterion, seed):
    return f"{criterion}__seed{seed}"


@dataclass
class RunRecord:
    criterion: str
    seed: int
    curve: list
    acquired: list
    wall_clock_seconds: float = 0.0

    def payload(self):
        """Deterministic content, i.e. everything except timing."""
        return {"criterion": self.criterion, "seed": self.seed,
                "curve": [[int(n), float(a)] for n, a in self.curve],
                "acquired": [[int(i) for i in r] for r in self.acquired]}

    def to_dict(self):
        return {**self.payload(), "wall_clock_seconds": self.wall_clock_seconds}

    @classmethod
    def from_dict(cls, d):
        return cls(d["criterion"], d["seed"], [tuple(p) for p in d["curve"]],
                   d["acquired"], d.get("wall_clock_seconds", 0.0))


def checkpoint_to_dict(result):
    ck = result.checkpoint
    est = ck["estimator"]
    return {"round": ck["round"],
            "labeled": [int(i) for i in ck["labeled"]],
            "candidates": [int(i) for i in ck["candidates"]],
            "students": [model_to_dict(s) for s in est.students_],
            "teacher": model_to_dict(est.teacher_.model),
            "teacher_construction": est.teacher_.construction,
            "final": model_to_dict(est.model_)}


def checkpoint_from_dict(d):
    students = [model_from_dict(s) for s in d["students"]]
    teacher = Teacher(model_from_dict(d["teacher"]), d["teacher_construction"])
    return {"round": d["round"], "labeled": np.asarray(d["labeled"]),
            "candidates": np.asarray(d["candidates"], dtype=np.int64),
            "ensemble": StudentEnsemble(students[0].spec, students),
            "teacher": teacher}


def _execute_run(cfg_dict, base_dir, criterion, seed, pool, test):
    cfg = ExperimentConfig.from_dict(cfg_dict, base_dir)
    t0 = time.perf_counter()
    result = run_active_learning(pool, test, cfg.al_config(criterion, seed))
    record = RunRecord(criterion, seed, result.curve, result.acquired,
                       time.perf_counter() - t0)
    return record, checkpoint_to_dict(result)


def _persist(runs_dir, record, checkpoint):
    name = run_name(record.criterion, record.seed)
    write_atomic(runs_dir / f"{name}.json", _dumps(record.to_dict()))
    write_atomic(runs_dir / f"{name}.checkpoint.json", json.dumps(checkpoint) + "\n")
    lines = ["labeled_count,accuracy"] + [f"{n},{a!r}" for n, a in record.curve]
    write_atomic(runs_dir / f"{name}.curve.csv", "\n".join(lines) + "\n")


def worker_count():
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(WORKERS_ENV, f"not an integer: {raw!r}") from None


def run_experiment(cfg, workers=None):
    """Run every (criterion, seed) pair and write the run directory.

    Returns ``(records, summary, failures)``; ``failures`` maps run names
    to error text. Completed runs are kept even when others fail.
    """
    out = cfg.out_path
    runs_dir = out / "runs"
    runs_dir.mkdir(parents=True, exist_ok=True)
    write_atomic(out / "config.json", _dumps(cfg.to_dict(absolute=True)))
    pool, test = build_datasets(cfg)

    jobs = [(c, s) for c in cfg.criteria for s in cfg.seeds]
    workers = worker_count() if workers is None else workers
    records, failures = [], {}

    def handle(job, fn):
        name = run_name(*job)
        marker = runs_dir / f"{name}.failed"
        try:
            record, ck = fn()
        except Exception:
            failures[name] = traceback.format_exc()
            write_atomic(marker, failures[name])
            log.error("run %s failed", name)
            return
        if marker.exists():
            marker.unlink()
        _persist(runs_dir, record, ck)
        records.append(record)

    args = (cfg.to_dict(), cfg.base_dir)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            futures = [(job, ex.submit(_execute_run, *args, *job, pool, test))
                       for job in jobs]
            for job, fut in futures:
                handle(job, fut.result)
    else:
        for job in jobs:
            handle(job, lambda job=job: _execute_run(*args, *job, pool, test))

    records.sort(key=lambda r: (cfg.criteria.index(r.criterion),
                                cfg.seeds.index(r.seed)))
    summary = summarize(records)
    if "random" in {r.criterion for r in records}:
        try:
            summary = compute_gap_vs_random(summary)
        except InvalidInputError:
            pass
    write_atomic(out / "summary.json", _dumps(summary.to_dict()))
    write_atomic(out / "summary.csv", summary.to_csv())
    return records, summary, failures


# ---------------------------------------------------------------- summaries

@dataclass
class SummaryRow:
    criterion: str
    labeled_count: int
    mean: float
    std: float
    n_seeds: int
    gap: float = None


@dataclass
class SummaryTable:
    rows: list

    def get(self, criterion, labeled_count):
        for r in self.rows:
            if r.criterion == criterion and r.labeled_count == labeled_count:
                return r
        raise KeyError((criterion, labeled_count))

    @property
    def criteria(self):
        return list(dict.fromkeys(r.criterion for r in self.rows))

    def to_dict(self):
        return {"rows": [vars(r).copy() for r in self.rows]}

    @classmethod
    def from_dict(cls, d):
        return cls([SummaryRow(**r) for r in d["rows"]])

    def to_csv(self):
        lines = ["criterion,labeled_count,mean_accuracy,std_accuracy,n_seeds,gap_vs_random"]
        for r in self.rows:
            gap = "" if r.gap is None else repr(r.gap)
            lines.append(f"{r.criterion},{r.labeled_count},{r.mean!r},"
                         f"{r.std!r},{r.n_seeds},{gap}")
        return "\n".join(lines) + "\n"


def summarize(records):
    """Mean and population standard deviation over seeds per curve point."""
    groups = {}
    for rec in records:
        for n, acc in rec.curve:
            groups.setdefault((rec.criterion, int(n)), []).append(float(acc))
    rows = []
    for (crit, n), accs in groups.items():
        a = np.asarray(accs)
        rows.append(SummaryRow(crit, n, float(a.mean()), float(a.std()), a.size))
    order = list(dict.fromkeys(r.criterion for r in records))
    rows.sort(key=lambda r: (order.index(r.criterion), r.labeled_count))
    return SummaryTable(rows)


def compute_gap_vs_random(summary):
    """Fill ``gap = mean(criterion) - mean(random)`` at each labeled count."""
    baseline = {r.labeled_count: r.mean for r in summary.rows
                if r.criterion == "random"}
    if not baseline:
        raise InvalidInputError("summary has no random baseline")
    rows = []
    for r in summary.rows:
        if r.labeled_count not in baseline:
            raise InvalidInputError(
                f"no random baseline at labeled_count={r.labeled_count}")
        gap = 0.0 if r.criterion == "random" else r.mean - baseline[r.labeled_count]
        rows.append(SummaryRow(r.criterion, r.labeled_count, r.mean, r.std,
                               r.n_seeds, gap))
    return SummaryTable(rows)


# ---------------------------------------------------------------- sweeps

def sweep_variant(cfg, axis, value):
    """Copy of ``cfg`` with one sweep axis set to ``value``."""
    raw = copy.deepcopy(cfg.to_dict())
    raw.pop("sweep", None)
    if axis == "b":
        raw["al"]["budget"] = value
    elif axis == "t":
        raw["al"]["temperature"] = value
    elif axis == "teacher":
        raw["al"]["teacher"] = value
    elif axis == "q":
        tr = TrainConfig(**raw.get("train", {}))
        raw.setdefault("train", {})["epochs"] = (
            tr.decay_epoch + int(value) * tr.snapshot_interval)
    else:
        raise InvalidInputError(f"unknown sweep axis {axis!r}")
    raw["output_dir"] = str(Path(cfg.output_dir) / f"sweep_{axis}" / f"{axis}={value}")
    return ExperimentConfig.from_dict(raw, cfg.base_dir)


def run_sweep(cfg, axis, workers=None):
    """Run one experiment per value of ``cfg.sweep[axis]``.

    Writes ``sweep_<axis>/sweep.csv`` (long form) and ``sweep_table.csv`` with
    one row per (value, criterion) and one mean-accuracy column per labeled
    count.
    """
    if axis not in cfg.sweep:
        raise ConfigError(f"sweep.{axis}", "no values listed for this axis")
    results, failures = [], {}
    for value in cfg.sweep[axis]:
        variant = sweep_variant(cfg, axis, value)
        _, summary, fails = run_experiment(variant, workers)
        results.append((value, summary))
        failures.update({f"{axis}={value}/{k}": v for k, v in fails.items()})

    out = cfg.out_path / f"sweep_{axis}"
    lines = [f"{axis},criterion,labeled_count,mean_accuracy,std_accuracy,gap_vs_random"]
    counts = []
    for value, summary in results:
        for r in summary.rows:
            gap = "" if r.gap is None else repr(r.gap)
            lines.append(f"{value},{r.criterion},{r.labeled_count},{r.mean!r},{r.std!r},{gap}")
            if r.labeled_count not in counts:
                counts.append(r.labeled_count)
    write_atomic(out / "sweep.csv", "\n".join(lines) + "\n")

    counts.sort()
    table = [",".join([axis, "criterion"] + [str(n) for n in counts])]
    for value, summary in results:
        for crit in summary.criteria:
            cells = []
            for n in counts:
                try:
                    cells.append(repr(summary.get(crit, n).mean))
                except KeyError:
                    cells.append("")
            table.append(",".join([str(value), crit] + cells))
    write_atomic(out / "sweep_table.csv", "\n".join(table) + "\n")
    return results, failures


# ---------------------------------------------------------------- analyses

def top_fraction_size(n, fraction):
    if not 0 < fraction <= 1:
        raise InvalidInputError("fraction must lie in (0, 1]")
    # guard against 0.05 * 1000 landing a hair above 50
    return max(1, math.ceil(round(fraction * n, 9)))


def rank_overlap(indices, scores_a, scores_b, fraction):
    """Share of the top-``fraction`` by ``scores_a`` also in the top by ``scores_b``."""
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size == 0:
        raise InvalidInputError("empty candidate set")
    k = top_fraction_size(indices.size, fraction)
    top_a = select_top_b(indices, scores_a, k)
    top_b = select_top_b(indices, scores_b, k)
    return np.intersect1d(top_a, top_b).size / k


def analyze_rank_overlap(ensemble, teacher, X, indices, fraction=0.05,
                         temperature=DEFAULT_TEMPERATURE):
    """Overlap of the entropy top set with the consistency top set on ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[0] == 0:
        raise InvalidInputError("empty candidate set")
    ent = entropy_score(X, teacher)
    cons = st_conal_score(X, ensemble, teacher, temperature)
    return rank_overlap(indices, ent, cons, fraction)


def prediction_histogram(true_class_probs, bins=10):
    """Equal-width histogram over [0, 1]; a value of 1 lands in the last bin."""
    if bins < 1:
        raise InvalidInputError("bins must be >= 1")
    counts, edges = np.histogram(np.asarray(true_class_probs, dtype=np.float64),
                                 bins=bins, range=(0.0, 1.0))
    return edges, counts


def analyze_prediction_histogram(teacher, X, labels, bins=10):
    """Histogram of the teacher's probability for each sample's true class."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size == 0:
        return prediction_histogram([], bins)
    p = np.atleast_2d(predict_proba(getattr(teacher, "model", teacher), X))
    return prediction_histogram(p[np.arange(labels.size), labels], bins)


def _load_checkpoints(run_dir):
    run_dir = Path(run_dir)
    cfg_path = run_dir / "config.json"
    if not cfg_path.exists():
        raise InvalidInputError(f"{run_dir} is not a run directory")
    cfg = ExperimentConfig.load(cfg_path)
    files = sorted((run_dir / "runs").glob("*.checkpoint.json"))
    if not files:
        raise InvalidInputError(f"no checkpoints under {run_dir / 'runs'}")
    out = []
    for f in files:
        ck = checkpoint_from_dict(json.loads(f.read_text(encoding="utf-8")))
        out.append((f.name[: -len(".checkpoint.json")], ck))
    return cfg, out


def analyze_run_dir(run_dir, kind, fraction=0.05, bins=10, dataset=None):
    """Run an analysis over every checkpoint in ``run_dir``.

    ``dataset`` supplies the pool when the config's data paths no longer
    resolve; by default it is rebuilt from the stored config.
    """
    cfg, checkpoints = _load_checkpoints(run_dir)
    pool = dataset if dataset is not None else build_datasets(cfg)[0]
    T = cfg.al.get("temperature", DEFAULT_TEMPERATURE)
    budget = cfg.al["budget"]
    report = {"kind": kind, "runs": {}}
    for name, ck in checkpoints:
        cands = ck["candidates"]
        Xc = pool.X[cands]
        if kind == "rank-overlap":
            report["runs"][name] = analyze_rank_overlap(
                ck["ensemble"], ck["teacher"], Xc, cands, fraction, T)
        elif kind == "pred-hist":
            per = {}
            scores = {
                "st-conal": st_conal_score(Xc, ck["ensemble"], ck["teacher"], T),
                "entropy": entropy_score(Xc, ck["teacher"]),
            }
            for crit, s in scores.items():
                picked = select_top_b(cands, s, budget)
                edges, counts = analyze_prediction_histogram(
                    ck["teacher"], pool.X[picked], pool.y[picked], bins)
                per[crit] = {"edges": edges.tolist(), "counts": counts.tolist()}
            report["runs"][name] = per
        else:
            raise InvalidInputError(f"unknown analysis {kind!r}")
    if kind == "rank-overlap":
        report["fraction"] = fraction
        report["mean_overlap"] = float(np.mean(list(report["runs"].values())))
    else:
        report["bins"] = bins
    out_dir = Path(run_dir) / "analysis"
    out_dir.mkdir(exist_ok=True)
    write_atomic(out_dir / f"{kind.replace('-', '_')}.json", _dumps(report))
    return report
