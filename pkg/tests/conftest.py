import json
from pathlib import Path

import numpy as np
import pytest

from stconal.model import MlpSpec, Model

ROOT = Path(__file__).resolve().parents[1]
DESK_CONFIG = ROOT / "configs" / "desk_benchmark.json"

_ACCEPTANCE = []


def record_criterion(number, passed, detail):
    _ACCEPTANCE.append((number, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(_ACCEPTANCE):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number:>2}: {detail}")


def constant_model(p):
    """Linear model whose prediction is ``p`` for the input ``[0.0]``."""
    p = np.asarray(p, dtype=np.float64)
    K = p.size
    w = np.concatenate([np.zeros(K), np.log(p)])
    return Model(MlpSpec((1, K)), w)


def small_config(tmp_path, **overrides):
    """A fast experiment config on a 100-sample blob set."""
    cfg = {
        "dataset": {"generator": "blobs", "n_classes": 4, "n_per_class": 32,
                    "dim": 4, "spread": 1.5, "class_separation": 3.0,
                    "test_fraction": 0.25, "seed": 0},
        "model": {"hidden_layer_sizes": [8], "activation": "relu"},
        "train": {"l0": 0.05, "gamma": 0.5, "decay_epoch": 6,
                  "snapshot_interval": 2, "epochs": 12, "momentum": 0.9,
                  "weight_decay": 0.001, "batch_size": 16},
        "al": {"rounds": 1, "budget": 8, "subset_size": 50,
               "initial_labeled": 12, "temperature": 0.7},
        "criteria": ["random"],
        "seeds": [1],
        "output_dir": str(tmp_path / "out"),
    }
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(cfg.get(key), dict):
            cfg[key] = {**cfg[key], **value}
        else:
            cfg[key] = value
    return cfg


def write_config(tmp_path, cfg, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg), encoding="utf-8")
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
