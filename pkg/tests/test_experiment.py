import json
import math

import numpy as np
import pytest

from conftest import small_config, write_config
from stconal.exceptions import ConfigError, InvalidInputError
from stconal.experiment import (ExperimentConfig, RunRecord, SummaryRow,
                                SummaryTable, analyze_run_dir,
                                compute_gap_vs_random, prediction_histogram,
                                rank_overlap, run_experiment, run_sweep,
                                summarize, sweep_variant, top_fraction_size)


def load(tmp_path, **kw):
    return ExperimentConfig.load(write_config(tmp_path, small_config(tmp_path, **kw)))


class TestConfig:
    def test_load_and_roundtrip(self, tmp_path):
        cfg = load(tmp_path)
        again = ExperimentConfig.from_dict(cfg.to_dict(), cfg.base_dir)
        assert again.to_dict() == cfg.to_dict()

    @pytest.mark.parametrize("patch, field", [
        ({"criteria": ["bogus"]}, "criteria"),
        ({"seeds": []}, "seeds"),
        ({"train": {"epochs": 3}}, "train"),
        ({"al": {"subset_size": 2}}, "al"),
    ])
    def test_invalid(self, tmp_path, patch, field):
        with pytest.raises(ConfigError) as exc:
            load(tmp_path, **patch)
        assert exc.value.field.startswith(field)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            ExperimentConfig.load(tmp_path / "nope.json")


class TestSummary:
    def _rec(self, crit, seed, accs):
        return RunRecord(crit, seed, [(10 * (i + 1), a) for i, a in enumerate(accs)], [])

    def test_matches_brute_force(self, rng):
        recs = [self._rec(c, s, rng.random(3)) for c in ("a", "random") for s in range(4)]
        table = summarize(recs)
        for crit in ("a", "random"):
            for i, n in enumerate((10, 20, 30)):
                vals = [r.curve[i][1] for r in recs if r.criterion == crit]
                mu = sum(vals) / len(vals)
                sd = math.sqrt(sum((v - mu) ** 2 for v in vals) / len(vals))
                row = table.get(crit, n)
                assert row.mean == pytest.approx(mu, abs=1e-12)
                assert row.std == pytest.approx(sd, abs=1e-12)
                assert row.n_seeds == 4

    def test_gap(self):
        table = SummaryTable([SummaryRow("st-conal", 10, 0.7, 0, 1),
                              SummaryRow("random", 10, 0.6, 0, 1),
                              SummaryRow("st-conal", 20, 0.8, 0, 1),
                              SummaryRow("random", 20, 0.8, 0, 1)])
        gapped = compute_gap_vs_random(table)
        assert gapped.get("st-conal", 10).gap == pytest.approx(0.1)
        assert gapped.get("st-conal", 20).gap == 0.0
        assert gapped.get("random", 10).gap == 0.0

    def test_gap_shift_invariance(self, rng):
        base = [SummaryRow(c, n, float(rng.random()), 0, 1)
                for c in ("x", "random") for n in (5, 10)]
        shifted = [SummaryRow(r.criterion, r.labeled_count, r.mean + 0.25, 0, 1)
                   for r in base]
        a = compute_gap_vs_random(SummaryTable(base))
        b = compute_gap_vs_random(SummaryTable(shifted))
        for ra, rb in zip(a.rows, b.rows):
            assert ra.gap == pytest.approx(rb.gap, abs=1e-12)

    def test_gap_needs_random(self):
        with pytest.raises(InvalidInputError):
            compute_gap_vs_random(SummaryTable([SummaryRow("x", 1, 0.5, 0, 1)]))


class TestRun:
    def test_minimal(self, tmp_path):
        cfg = load(tmp_path)
        records, summary, failures = run_experiment(cfg)
        assert not failures and len(records) == 1
        assert len(records[0].curve) == 2
        out = tmp_path / "out"
        for name in ("config.json", "summary.json", "summary.csv",
                     "runs/random__seed1.json", "runs/random__seed1.curve.csv",
                     "runs/random__seed1.checkpoint.json"):
            assert (out / name).exists(), name
        stored = json.loads((out / "runs/random__seed1.json").read_text())
        assert stored["curve"] == [[12, records[0].curve[0][1]], [20, records[0].curve[1][1]]]

    def test_rerun_identical(self, tmp_path):
        cfg = load(tmp_path, criteria=["st-conal", "random"])
        a, _, _ = run_experiment(cfg)
        b, _, _ = run_experiment(cfg)
        dump = lambda rs: json.dumps([r.payload() for r in rs], sort_keys=True)
        assert dump(a) == dump(b)

    def test_grid(self, tmp_path):
        cfg = load(tmp_path, criteria=["entropy", "random"], seeds=[1, 2, 3, 4, 5])
        records, summary, _ = run_experiment(cfg)
        assert len(records) == 10
        assert {(r.criterion, r.seed) for r in records} == {
            (c, s) for c in ("entropy", "random") for s in range(1, 6)}
        assert all(r.n_seeds == 5 for r in summary.rows)
        assert summary.get("entropy", 12).gap is not None

    def test_parallel_matches_serial(self, tmp_path):
        cfg = load(tmp_path, seeds=[1, 2])
        serial, _, _ = run_experiment(cfg, workers=1)
        par, _, _ = run_experiment(cfg, workers=2)
        assert [r.payload() for r in serial] == [r.payload() for r in par]

    def test_failure_marker(self, tmp_path):
        # the pool has 96 rows; 12 initial + 10 rounds of 8 = 92 fits, 12 rounds don't
        cfg = load(tmp_path, al={"rounds": 12})
        records, _, failures = run_experiment(cfg)
        assert not records
        assert list(failures) == ["random__seed1"]
        assert (tmp_path / "out/runs/random__seed1.failed").exists()


class TestSweep:
    def test_single_value_matches_run(self, tmp_path):
        cfg = load(tmp_path, sweep={"b": [8]})
        direct, _, _ = run_experiment(cfg)
        results, failures = run_sweep(cfg, "b")
        assert not failures
        stored = json.loads(
            (tmp_path / "out/sweep_b/b=8/runs/random__seed1.json").read_text())
        assert stored["curve"] == direct[0].payload()["curve"]

    def test_q_axis_sets_epochs(self, tmp_path):
        cfg = load(tmp_path, sweep={"q": [1, 3]})
        for q in (1, 3):
            v = sweep_variant(cfg, "q", q)
            assert v.train_config().n_snapshots == q
        run_sweep(cfg, "q")
        table = (tmp_path / "out/sweep_q/sweep_table.csv").read_text().splitlines()
        assert table[0] == "q,criterion,12,20"
        assert [l.split(",")[0] for l in table[1:]] == ["1", "3"]

    def test_t_axis(self, tmp_path):
        cfg = load(tmp_path, criteria=["st-conal"], sweep={"t": [0.5, 1.0]})
        assert sweep_variant(cfg, "t", 0.5).al_config("st-conal", 1).criterion.temperature == 0.5
        results, _ = run_sweep(cfg, "t")
        assert [v for v, _ in results] == [0.5, 1.0]

    def test_missing_axis(self, tmp_path):
        with pytest.raises(ConfigError):
            run_sweep(load(tmp_path), "b")


class TestAnalysis:
    def test_top_fraction_size(self):
        assert top_fraction_size(1000, 0.05) == 50
        assert top_fraction_size(10, 0.01) == 1
        assert top_fraction_size(7, 1.0) == 7

    def test_rank_overlap_vs_sets(self, rng):
        for _ in range(100):
            n = int(rng.integers(5, 60))
            idx = rng.permutation(1000)[:n]
            a, b = rng.random(n), rng.random(n)
            f = float(rng.uniform(0.05, 1.0))
            k = max(1, math.ceil(round(f * n, 9)))
            top = lambda s: {int(idx[i]) for i in sorted(range(n), key=lambda i: (-s[i], idx[i]))[:k]}
            assert rank_overlap(idx, a, b, f) == pytest.approx(len(top(a) & top(b)) / k)

    def test_rank_overlap_extremes(self, rng):
        idx = np.arange(20)
        a = rng.random(20)
        assert rank_overlap(idx, a, rng.random(20), 1.0) == 1.0
        assert rank_overlap(idx, a, -a, 0.25) == 0.0
        assert rank_overlap(idx, a, a, 0.25) == 1.0

    def test_histogram(self):
        edges, counts = prediction_histogram([0.1, 0.4, 0.6, 0.9], bins=2)
        assert counts.tolist() == [2, 2]
        np.testing.assert_allclose(edges, [0, 0.5, 1])
        assert prediction_histogram([1.0, 1.0], bins=4)[1].tolist() == [0, 0, 0, 2]
        assert prediction_histogram([0.0], bins=3)[1].tolist() == [1, 0, 0]

    def test_histogram_conserves(self, rng):
        v = rng.random(500)
        for bins in (1, 7, 10):
            assert prediction_histogram(v, bins)[1].sum() == 500

    def test_run_dir(self, tmp_path):
        cfg = load(tmp_path, criteria=["st-conal"])
        run_experiment(cfg)
        out = tmp_path / "out"
        ro = analyze_run_dir(out, "rank-overlap", fraction=0.2)
        assert 0 <= ro["runs"]["st-conal__seed1"] <= 1
        ph = analyze_run_dir(out, "pred-hist", bins=5)
        for crit in ("st-conal", "entropy"):
            assert sum(ph["runs"]["st-conal__seed1"][crit]["counts"]) == 8
        assert (out / "analysis/pred_hist.json").exists()

    def test_not_a_run_dir(self, tmp_path):
        with pytest.raises(InvalidInputError):
            analyze_run_dir(tmp_path, "rank-overlap")
