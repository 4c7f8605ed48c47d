"""Experiment driver tests.

Determinism is the backbone: a config must map to byte-identical output
files, and each replica's record must be reproducible in isolation from
(master_seed, size index, replica index) alone.  The aggregation contracts
(pmf normalization, interval coverage, failure accounting) are checked on
real small runs, and the writers on synthetic outcomes that exercise every
encoding branch.
"""

import json
import math
from pathlib import Path

import numpy as np
import pytest

from heavyhop.distance import Hopcount
from heavyhop.montecarlo import (
    REPLICA_CSV_HEADER,
    ConfigError,
    ExperimentConfig,
    ReplicaOutcome,
    SizeSummary,
    SummaryTable,
    bucket_labels,
    compare_conditioned,
    estimate_p,
    replica_rng,
    run_experiment,
    run_replica,
    summarize,
    write_histogram_tsvs,
    write_replica_csv,
    write_summary_json,
)

SMALL = dict(tau=1.8, n_list=[200, 400], replicas=40, master_seed=909)


class TestConfig:
    def test_tau_message_cites_the_range(self):
        with pytest.raises(ConfigError, match=r"\(1, 2\)"):
            ExperimentConfig(tau=2.5, n_list=[10], replicas=1, master_seed=0)

    @pytest.mark.parametrize("bad", [
        dict(tau=1.0), dict(tau=2.0), dict(n_list=[]), dict(n_list=[1]),
        dict(replicas=0), dict(master_seed=-1), dict(master_seed=2 ** 64),
        dict(alpha=0.0), dict(cutoff=0), dict(epsilon=0.0), dict(epsilon=1.0),
        dict(giants_mode="none"), dict(giants_k=0), dict(top_m=0),
    ])
    def test_invalid_fields(self, bad):
        kw = dict(SMALL)
        kw.update(bad)
        with pytest.raises(ConfigError):
            ExperimentConfig(**kw)

    def test_beta_mode_needs_finite_alpha(self):
        with pytest.raises(ConfigError, match="finite alpha"):
            ExperimentConfig(giants_mode="beta", **SMALL)
        ExperimentConfig(giants_mode="beta", alpha=1.0, **SMALL)  # fine

    def test_json_dict_encodes_infinite_alpha(self):
        cfg = ExperimentConfig(alpha=math.inf, **SMALL)
        assert cfg.to_json_dict()["alpha"] == "inf"
        assert ExperimentConfig(**SMALL).to_json_dict()["alpha"] is None

    def test_bucket_labels(self):
        assert bucket_labels(3) == ["0", "1", "2", "3", ">3", "inf"]


class TestReplicaStreams:
    def test_rng_is_a_pure_function_of_coordinates(self):
        cfg = ExperimentConfig(**SMALL)
        a = replica_rng(cfg, 1, 7).integers(0, 2 ** 32, size=8)
        b = replica_rng(cfg, 1, 7).integers(0, 2 ** 32, size=8)
        c = replica_rng(cfg, 1, 8).integers(0, 2 ** 32, size=8)
        d = replica_rng(cfg, 0, 7).integers(0, 2 ** 32, size=8)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)
        assert not np.array_equal(a, d)

    def test_standalone_replica_matches_experiment_record(self):
        cfg = ExperimentConfig(collect_flags=True, **SMALL)
        _, outcomes = run_experiment(cfg)
        probe = [o for o in outcomes if o.size_index == 1][11]
        redo = run_replica(cfg, 1, probe.replica)
        assert redo.bucket == probe.bucket
        assert redo.total == probe.total
        assert (redo.d1, redo.d2) == (probe.d1, probe.d2)
        assert redo.ratios == probe.ratios
        assert redo.flags == probe.flags
        assert redo.giant_mass == probe.giant_mass

    def test_random_pair_mode_runs_deterministically(self):
        cfg = ExperimentConfig(random_pair=True, **SMALL)
        one = run_replica(cfg, 0, 3)
        two = run_replica(cfg, 0, 3)
        assert one.bucket == two.bucket
        assert (one.d1, one.d2) == (two.d1, two.d2)


@pytest.fixture(scope="module")
def small_run():
    cfg = ExperimentConfig(collect_flags=True, **SMALL)
    return cfg, *run_experiment(cfg)


class TestAggregation:
    def test_pmf_normalization(self, small_run):
        _, summary, _ = small_run
        for s in summary.sizes:
            assert abs(sum(s.pmf().values()) - 1.0) < 1e-12

    def test_intervals_contain_point(self, small_run):
        _, summary, _ = small_run
        for s in summary.sizes:
            for label, cell in s.bucket_stats().items():
                assert cell["ci_lo"] <= cell["p"] <= cell["ci_hi"]
                assert cell["count"] == s.bucket_counts[label]

    def test_estimate_p_matches_counts(self, small_run):
        _, summary, _ = small_run
        p, (lo, hi) = estimate_p(summary)
        s = summary.for_n(400)  # defaults to the largest size
        n2, n3 = s.bucket_counts["2"], s.bucket_counts["3"]
        assert p == pytest.approx(n2 / (n2 + n3))
        assert lo <= p <= hi

    def test_summarize_is_pure_aggregation(self, small_run):
        cfg, summary, outcomes = small_run
        again = summarize(cfg, outcomes)
        assert again.to_json_dict() == summary.to_json_dict()


def synthetic_summary(counts: dict[str, int]) -> SummaryTable:
    cfg = ExperimentConfig(tau=1.8, n_list=[100], replicas=sum(counts.values()),
                           master_seed=1)
    labels = {k: 0 for k in bucket_labels(cfg.cutoff)}
    labels.update(counts)
    size = SizeSummary(size_index=0, n=100, replicas=sum(counts.values()),
                       completed=sum(counts.values()), failed=0,
                       bucket_counts=labels, p_hat=None, p_hat_ci=None,
                       event_rates=None, mean_giant_mass=None, cap_hit_replicas=0)
    return SummaryTable(config=cfg, sizes=[size])


class TestEstimateP:
    def test_even_split(self):
        p, (lo, hi) = estimate_p(synthetic_summary({"2": 500, "3": 500}))
        assert p == pytest.approx(0.5)
        assert lo < 0.5 < hi

    def test_empty_core_is_an_error(self):
        with pytest.raises(ValueError, match="undefined"):
            estimate_p(synthetic_summary({"1": 100, "inf": 3}))

    def test_unknown_size_is_an_error(self):
        with pytest.raises(KeyError):
            estimate_p(synthetic_summary({"2": 10, "3": 10}), n=999)


class TestConditionedComparison:
    def test_infinite_sentinel_gives_exactly_zero(self):
        base = dict(tau=1.8, n_list=[300], replicas=200, master_seed=5)
        tv = compare_conditioned(ExperimentConfig(**base),
                                 ExperimentConfig(alpha=math.inf, **base))
        assert tv == 0.0

    def test_boundary_alpha_rejected(self):
        base = dict(tau=1.8, n_list=[300], replicas=10, master_seed=5)
        with pytest.raises(ConfigError, match="boundary"):
            compare_conditioned(ExperimentConfig(**base),
                                ExperimentConfig(alpha=1.25, **base))
        with pytest.raises(ConfigError, match="boundary"):
            compare_conditioned(ExperimentConfig(**base),
                                ExperimentConfig(alpha=1.0, **base))

    def test_mismatched_configs_rejected(self):
        base = dict(n_list=[300], replicas=10, master_seed=5)
        u = ExperimentConfig(tau=1.8, **base)
        with pytest.raises(ConfigError):
            compare_conditioned(u, ExperimentConfig(tau=1.9, alpha=2.0, **base))
        with pytest.raises(ConfigError):
            compare_conditioned(u, ExperimentConfig(tau=1.8, alpha=2.0, n_list=[400],
                                                    replicas=10, master_seed=5))
        with pytest.raises(ConfigError, match="truncation"):
            compare_conditioned(ExperimentConfig(tau=1.8, alpha=1.5, **base),
                                ExperimentConfig(tau=1.8, alpha=2.0, **base))


class TestFailureAccounting:
    def test_stub_cap_failures_are_counted_not_silenced(self):
        # eager mode with an impossible cap: every replica fails loudly
        cfg = ExperimentConfig(tau=1.8, n_list=[100], replicas=20, master_seed=3,
                               lazy=False, stub_cap=10)
        summary, outcomes = run_experiment(cfg)
        s = summary.for_n(100)
        assert s.failed == 20 and s.completed == 0
        assert all(o.failed and o.bucket is None and o.error for o in outcomes)
        with pytest.raises(ValueError):
            estimate_p(summary)


class TestWriters:
    def synthetic_outcomes(self):
        flags = None
        return [
            ReplicaOutcome(size_index=0, n=100, replica=0, hop=Hopcount.exact(2),
                           total=220, d1=3, d2=2, ratios=(0.5, 0.25),
                           parity_corrected=False, cap_hits=0, flags=flags),
            ReplicaOutcome(size_index=0, n=100, replica=1, hop=Hopcount.exceeds(10),
                           total=240, d1=2, d2=2, ratios=(0.5, 0.25),
                           parity_corrected=True, cap_hits=0, flags=flags),
            ReplicaOutcome(size_index=0, n=100, replica=2, hop=Hopcount.infinite(),
                           total=260, d1=2, d2=5, ratios=(0.5, 0.25),
                           parity_corrected=False, cap_hits=1, flags=flags),
            ReplicaOutcome(size_index=0, n=100, replica=3, hop=None,
                           total=280, d1=2, d2=2, ratios=(0.5, 0.25),
                           parity_corrected=False, cap_hits=0, flags=flags,
                           failed=True, error="too big"),
        ]

    def test_csv_header_and_encodings(self, tmp_path):
        path = tmp_path / "replicas.csv"
        write_replica_csv(self.synthetic_outcomes(), path)
        lines = path.read_text().splitlines()
        assert lines[0] == ("size_index,N,replica,hopcount,LN,D1,D2,ratio1,ratio2,"
                            "flagB,flagC,flagD,flagA,giant_mass,parity,failed")
        assert lines[0] == ",".join(REPLICA_CSV_HEADER)
        rows = [line.split(",") for line in lines[1:]]
        hop_col = lines[0].split(",").index("hopcount")
        fail_col = lines[0].split(",").index("failed")
        assert [r[hop_col] for r in rows] == ["2", ">10", "inf", ""]
        assert [r[fail_col] for r in rows] == ["0", "0", "0", "1"]

    def test_rerun_is_byte_identical(self, tmp_path):
        cfg = ExperimentConfig(collect_flags=True, **SMALL)
        blobs = []
        for name in ("one", "two"):
            d = tmp_path / name
            d.mkdir()
            summary, outcomes = run_experiment(cfg)
            write_replica_csv(outcomes, d / "replicas.csv")
            write_summary_json(summary, d / "summary.json")
            write_histogram_tsvs(summary, d)
            blobs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
        assert set(blobs[0]) == {"replicas.csv", "summary.json",
                                 "hist_N200.tsv", "hist_N400.tsv"}
        assert blobs[0] == blobs[1]

    def test_summary_json_shape(self, tmp_path):
        cfg = ExperimentConfig(**SMALL)
        summary, _ = run_experiment(cfg)
        path = tmp_path / "summary.json"
        write_summary_json(summary, path)
        doc = json.loads(path.read_text())
        assert doc["config"]["master_seed"] == SMALL["master_seed"]
        for n in ("200", "400"):
            buckets = doc["sizes"][n]["buckets"]
            assert set(buckets["2"]) == {"count", "p", "ci_lo", "ci_hi"}
            assert doc["sizes"][n]["p_hat"] is not None
            total_p = sum(cell["p"] for cell in buckets.values())
            assert abs(total_p - 1.0) < 1e-9

    def test_histograms_cover_all_buckets(self, tmp_path):
        cfg = ExperimentConfig(**SMALL)
        summary, _ = run_experiment(cfg)
        paths = write_histogram_tsvs(summary, tmp_path)
        assert [p.name for p in paths] == ["hist_N200.tsv", "hist_N400.tsv"]
        lines = paths[0].read_text().splitlines()
        assert lines[0] == "bucket\tprobability"
        buckets = [line.split("\t")[0] for line in lines[1:]]
        assert buckets == bucket_labels(cfg.cutoff)
        probs = [float(line.split("\t")[1]) for line in lines[1:]]
        assert abs(sum(probs) - 1.0) < 1e-9
