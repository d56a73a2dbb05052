import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import small_config, write_config
from stconal.cli import main
from stconal.datasets import load_csv


def test_gen_data_balanced(tmp_path):
    out = tmp_path / "d.csv"
    assert main(["gen-data", "--classes", "4", "--per-class", "25", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 101 and lines[0] == "f0,f1,label"
    assert load_csv(out).class_counts.tolist() == [25] * 4


def test_gen_data_step(tmp_path):
    out = tmp_path / "d.csv"
    rc = main(["gen-data", "--classes", "4", "--per-class", "100",
               "--imbalance", "step", "--ratio", "10", str(out)])
    assert rc == 0
    counts = load_csv(out).class_counts
    assert sorted(set(counts.tolist())) == [10, 100]


def test_gen_data_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        main(["gen-data", "--seed", "3", "--dim", "5", str(p)])
    assert a.read_bytes() == b.read_bytes()


def test_gen_data_bad_args(tmp_path):
    assert main(["gen-data", "--classes", "1", str(tmp_path / "x.csv")]) == 1
    assert main(["gen-data", "--classes", "3", "--imbalance", "step",
                 str(tmp_path / "x.csv")]) == 1


def test_usage_errors(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "cfg.json", "--axis", "zzz"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 1
    assert main(["run", str(tmp_path / "missing.json")]) == 1
    bad = write_config(tmp_path, small_config(tmp_path, criteria=["nope"]))
    assert main(["run", str(bad)]) == 1


def test_run_and_analyze(tmp_path, capsys):
    path = write_config(tmp_path, small_config(tmp_path, criteria=["st-conal", "random"]))
    assert main(["run", str(path)]) == 0
    assert "st-conal" in capsys.readouterr().out
    out = tmp_path / "out"
    assert main(["analyze", "rank-overlap", str(out), "--fraction", "0.1"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert set(report["runs"]) == {"st-conal__seed1", "random__seed1"}
    assert main(["analyze", "pred-hist", str(out), "--bins", "4"]) == 0
    assert main(["analyze", "pred-hist", str(tmp_path)]) == 1


def test_runtime_failure_exit(tmp_path):
    path = write_config(tmp_path, small_config(tmp_path, al={"rounds": 12}))
    assert main(["run", str(path)]) == 2


def test_sweep(tmp_path):
    path = write_config(tmp_path, small_config(tmp_path, sweep={"teacher": ["ewa", "ema"]},
                                               criteria=["st-conal"]))
    assert main(["sweep", str(path), "--axis", "teacher"]) == 0
    rows = (tmp_path / "out/sweep_teacher/sweep_table.csv").read_text().splitlines()
    assert [r.split(",")[0] for r in rows[1:]] == ["ewa", "ema"]


def test_entry_point_module(tmp_path):
    out = tmp_path / "d.csv"
    proc = subprocess.run([sys.executable, "-m", "stconal.cli", "gen-data", str(out)],
                          capture_output=True)
    assert proc.returncode == 0 and out.exists()
