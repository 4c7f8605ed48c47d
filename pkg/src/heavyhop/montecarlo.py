"""Replicated hopcount experiments over a grid of graph sizes.

Every replica is an independent world: sample a degree sequence, match the
stubs, measure the hopcount between the two tracked endpoints, optionally
evaluate the structural certificate flags.  Replica (i, r) draws all of its
randomness from a generator derived purely from (master_seed, i, r), so runs
are reproducible bit for bit, replicas can be executed in any order, and
adding sizes or replicas never perturbs the existing ones.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .degree_model import DEFAULT_DEGREE_CAP, DegreeLaw, DegreeSequence, sample_sequence
from .diagnostics import EventFlags, event_flags, giant_mass_fraction, giants_beta, giants_topk, order_stats
from .distance import DEFAULT_CUTOFF, Hopcount, bidirectional_hopcount
from .matching import DEFAULT_STUB_CAP, StubCapError, build_eager, build_lazy

REPLICA_CSV_HEADER = [
    "size_index", "N", "replica", "hopcount", "LN", "D1", "D2",
    "ratio1", "ratio2", "flagB", "flagC", "flagD", "flagA",
    "giant_mass", "parity", "failed",
]


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run needs; hashable and echoed verbatim into manifests.

    Args:
        tau: degree tail exponent, in (1, 2).
        n_list: graph sizes to sweep.
        replicas: independent replicas per size.
        master_seed: 64-bit root seed; replica (i, r) uses a stream derived
            from (master_seed, i, r) and nothing else.
        alpha: optional truncation exponent (degrees < N ** alpha).
            ``math.inf`` is accepted as an explicit no-truncation sentinel
            that still follows the conditioned code path.
        cutoff: hopcount search depth limit.
        epsilon: tolerance knob for the bounded-endpoint flag.
        giants_mode: "topk" (the giants_k largest-degree nodes) or "beta"
            (the truncated-regime degree window; needs a finite alpha).
        giants_k: k for topk mode.
        collect_flags: evaluate certificate flags and giant mass per replica.
        lazy: reveal matchings on demand instead of building them eagerly.
        random_pair: measure a uniform random distinct pair instead of
            nodes 1 and 2 (the endpoints are exchangeable either way).
        top_m: how many top degree ratios to record.
        stub_cap: eager builds refuse larger stub totals (the replica is
            then counted as failed).
        degree_cap: numerical cap on a single degree.
    """

    tau: float
    n_list: tuple[int, ...]
    replicas: int
    master_seed: int
    alpha: float | None = None
    cutoff: int = DEFAULT_CUTOFF
    epsilon: float = 0.5
    giants_mode: str = "topk"
    giants_k: int = 10
    collect_flags: bool = False
    lazy: bool = True
    random_pair: bool = False
    top_m: int = 2
    stub_cap: int = DEFAULT_STUB_CAP
    degree_cap: int = DEFAULT_DEGREE_CAP

    def __post_init__(self):
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        if not 1.0 < self.tau < 2.0:
            raise ConfigError(f"tau must lie in the supported range (1, 2), got {self.tau}")
        if not self.n_list:
            raise ConfigError("n_list must not be empty")
        if any(n < 2 for n in self.n_list):
            raise ConfigError("every graph size must be at least 2")
        if self.replicas < 1:
            raise ConfigError(f"replicas must be positive, got {self.replicas}")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must fit in 64 bits")
        if self.alpha is not None and not self.alpha > 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")
        if self.cutoff < 1:
            raise ConfigError(f"cutoff must be at least 1, got {self.cutoff}")
        if not 0.0 < self.epsilon < 1.0:
            raise ConfigError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.giants_mode not in ("topk", "beta"):
            raise ConfigError(f"giants_mode must be 'topk' or 'beta', got {self.giants_mode!r}")
        if self.giants_mode == "beta" and (self.alpha is None or math.isinf(self.alpha)):
            raise ConfigError("giants_mode 'beta' needs a finite alpha")
        if self.giants_k < 1:
            raise ConfigError(f"giants_k must be positive, got {self.giants_k}")
        if self.top_m < 1:
            raise ConfigError(f"top_m must be positive, got {self.top_m}")

    @property
    def law(self) -> DegreeLaw:
        return DegreeLaw(self.tau, truncation=self.alpha, degree_cap=self.degree_cap)

    def to_json_dict(self) -> dict:
        d = {
            "tau": self.tau,
            "n_list": list(self.n_list),
            "replicas": self.replicas,
            "master_seed": self.master_seed,
            "alpha": None if self.alpha is None else (
                "inf" if math.isinf(self.alpha) else self.alpha),
            "cutoff": self.cutoff,
            "epsilon": self.epsilon,
            "giants_mode": self.giants_mode,
            "giants_k": self.giants_k,
            "collect_flags": self.collect_flags,
            "lazy": self.lazy,
            "random_pair": self.random_pair,
            "top_m": self.top_m,
            "stub_cap": self.stub_cap,
            "degree_cap": self.degree_cap,
        }
        return d


def replica_rng(cfg: ExperimentConfig, size_index: int, replica: int) -> np.random.Generator:
    """The RNG stream of replica (size_index, replica).

    A pure function of (master_seed, size_index, replica): the spawn key is
    hashed into the seed sequence, so streams are independent and the
    execution order of replicas is irrelevant.
    """
    ss = np.random.SeedSequence(cfg.master_seed, spawn_key=(size_index, replica))
    return np.random.default_rng(ss)


@dataclass
class ReplicaOutcome:
    """One replica's measurements; hop is None when the replica failed."""

    size_index: int
    n: int
    replica: int
    hop: Hopcount | None
    total: int
    d1: int
    d2: int
    ratios: tuple[float, ...]
    parity_corrected: bool
    cap_hits: int
    flags: EventFlags | None = None
    giant_mass: float | None = None
    failed: bool = False
    error: str | None = None
    wall_time: float = 0.0

    @property
    def bucket(self) -> str | None:
        return None if self.hop is None else self.hop.label


def _measured_pair(cfg: ExperimentConfig, n: int, rng: np.random.Generator) -> tuple[int, int]:
    if not cfg.random_pair:
        return 1, 2
    a = int(rng.integers(1, n + 1))
    b = int(rng.integers(1, n))
    if b >= a:
        b += 1
    return a, b


def run_replica(cfg: ExperimentConfig, size_index: int, replica: int) -> ReplicaOutcome:
    """Run a single replica from its own stream (see replica_rng)."""
    n = cfg.n_list[size_index]
    rng = replica_rng(cfg, size_index, replica)
    t0 = time.perf_counter()
    law = cfg.law
    seq = sample_sequence(law, n, rng)
    a, b = _measured_pair(cfg, n, rng)
    stats = order_stats(seq, law, m=min(cfg.top_m, n))
    ratios = tuple(float(r) for r in stats.ratios)

    hop = None
    flags = None
    mass = None
    failed = False
    error = None
    try:
        if cfg.lazy:
            m = build_lazy(seq, rng)
        else:
            m = build_eager(seq, rng, stub_cap=cfg.stub_cap)
        hop = bidirectional_hopcount(m, a, b, cutoff=cfg.cutoff)
        if cfg.collect_flags:
            if cfg.giants_mode == "topk":
                giants = giants_topk(seq, min(cfg.giants_k, n))
            else:
                giants = giants_beta(seq, law)
            if giants:
                flags = event_flags(m, seq, law, giants, cfg.epsilon, endpoints=(a, b))
                mass = giant_mass_fraction(seq, giants)
    except StubCapError as exc:
        failed = True
        error = str(exc)
        hop = None
        flags = None
        mass = None

    return ReplicaOutcome(
        size_index=size_index,
        n=n,
        replica=replica,
        hop=hop,
        total=seq.total,
        d1=seq.degree_of(a),
        d2=seq.degree_of(b),
        ratios=ratios,
        parity_corrected=seq.parity_corrected,
        cap_hits=seq.cap_hits,
        flags=flags,
        giant_mass=mass,
        failed=failed,
        error=error,
        wall_time=time.perf_counter() - t0,
    )


def bucket_labels(cutoff: int) -> list[str]:
    """All hopcount buckets in display order: 0..cutoff, ">cutoff", "inf"."""
    return [str(i) for i in range(cutoff + 1)] + [f">{cutoff}", "inf"]


@dataclass
class SizeSummary:
    """Aggregates for one graph size."""

    size_index: int
    n: int
    replicas: int
    completed: int
    failed: int
    bucket_counts: dict[str, int]
    p_hat: float | None
    p_hat_ci: tuple[float, float] | None
    event_rates: dict[str, float] | None
    mean_giant_mass: float | None
    cap_hit_replicas: int

    def pmf(self) -> dict[str, float]:
        """Empirical hopcount pmf over completed replicas."""
        if self.completed == 0:
            return {k: 0.0 for k in self.bucket_counts}
        return {k: v / self.completed for k, v in self.bucket_counts.items()}

    def bucket_stats(self) -> dict[str, dict]:
        from .stats import wilson_interval

        out = {}
        for label, count in self.bucket_counts.items():
            if self.completed:
                p = count / self.completed
                lo, hi = wilson_interval(count, self.completed)
            else:
                p, lo, hi = 0.0, 0.0, 0.0
            out[label] = {"count": count, "p": p, "ci_lo": lo, "ci_hi": hi}
        return out


@dataclass
class SummaryTable:
    """Per-size summaries plus the config that produced them."""

    config: ExperimentConfig
    sizes: list[SizeSummary] = field(default_factory=list)

    def for_n(self, n: int) -> SizeSummary:
        for s in self.sizes:
            if s.n == n:
                return s
        raise KeyError(f"no summary for N={n}")

    def to_json_dict(self) -> dict:
        sizes = {}
        for s in self.sizes:
            sizes[str(s.n)] = {
                "size_index": s.size_index,
                "replicas": s.replicas,
                "completed": s.completed,
                "failed": s.failed,
                "buckets": s.bucket_stats(),
                "p_hat": s.p_hat,
                "p_hat_ci": list(s.p_hat_ci) if s.p_hat_ci else None,
                "event_rates": s.event_rates,
                "mean_giant_mass": s.mean_giant_mass,
                "cap_hit_replicas": s.cap_hit_replicas,
            }
        return {"config": self.config.to_json_dict(), "sizes": sizes}


def summarize(cfg: ExperimentConfig, outcomes: list[ReplicaOutcome]) -> SummaryTable:
    """Aggregate replica outcomes into a SummaryTable."""
    from .stats import wilson_interval

    table = SummaryTable(config=cfg)
    labels = bucket_labels(cfg.cutoff)
    for i, n in enumerate(cfg.n_list):
        rows = [o for o in outcomes if o.size_index == i]
        counts = {k: 0 for k in labels}
        completed = failed = cap_hit = 0
        flag_sums = {"endpoints_to_giants": 0, "giants_complete": 0,
                     "endpoints_bounded": 0, "certified": 0}
        flagged = 0
        masses = []
        for o in rows:
            if o.cap_hits:
                cap_hit += 1
            if o.failed:
                failed += 1
                continue
            completed += 1
            counts[o.bucket] += 1
            if o.flags is not None:
                flagged += 1
                flag_sums["endpoints_to_giants"] += o.flags.endpoints_to_giants
                flag_sums["giants_complete"] += o.flags.giants_complete
                flag_sums["endpoints_bounded"] += o.flags.endpoints_bounded
                flag_sums["certified"] += o.flags.certified
            if o.giant_mass is not None:
                masses.append(o.giant_mass)

        n2, n3 = counts.get("2", 0), counts.get("3", 0)
        if n2 + n3 > 0:
            p_hat = n2 / (n2 + n3)
            ci = wilson_interval(n2, n2 + n3)
        else:
            p_hat, ci = None, None
        rates = ({k: v / flagged for k, v in flag_sums.items()} if flagged else None)
        table.sizes.append(SizeSummary(
            size_index=i,
            n=n,
            replicas=len(rows),
            completed=completed,
            failed=failed,
            bucket_counts=counts,
            p_hat=p_hat,
            p_hat_ci=ci,
            event_rates=rates,
            mean_giant_mass=(float(np.mean(masses)) if masses else None),
            cap_hit_replicas=cap_hit,
        ))
    return table


def run_experiment(cfg: ExperimentConfig, progress=None) -> tuple[SummaryTable, list[ReplicaOutcome]]:
    """Run the full grid and aggregate.

    Args:
        cfg: the experiment configuration.
        progress: optional callable invoked as progress(size_index, n,
            elapsed_seconds) after each size finishes.

    Returns:
        (summary, outcomes); outcomes are ordered by (size_index, replica).
    """
    outcomes: list[ReplicaOutcome] = []
    for i, n in enumerate(cfg.n_list):
        t0 = time.perf_counter()
        for r in range(cfg.replicas):
            outcomes.append(run_replica(cfg, i, r))
        if progress is not None:
            progress(i, n, time.perf_counter() - t0)
    return summarize(cfg, outcomes), outcomes


def estimate_p(summary: SummaryTable, n: int | None = None) -> tuple[float, tuple[float, float]]:
    """Estimate the limiting share of 2-hop outcomes among {2, 3}.

    Args:
        summary: a finished summary table.
        n: which size to read; defaults to the largest.

    Returns:
        (p_hat, (ci_lo, ci_hi)) with a Wilson 95% interval.

    Raises:
        ValueError: if no completed replica landed in {2, 3}.
    """
    from .stats import wilson_interval

    target = max(s.n for s in summary.sizes) if n is None else n
    s = summary.for_n(target)
    n2, n3 = s.bucket_counts.get("2", 0), s.bucket_counts.get("3", 0)
    if n2 + n3 == 0:
        raise ValueError(f"no hopcount landed in {{2, 3}} at N={target}; p is undefined")
    return n2 / (n2 + n3), wilson_interval(n2, n2 + n3)


def compare_conditioned(cfg_uncond: ExperimentConfig, cfg_cond: ExperimentConfig) -> float:
    """Total variation between unconditioned and conditioned hopcount pmfs.

    Valid only in the coupling regime alpha > 1 / (tau - 1), where the
    truncated model agrees with the unconditioned one up to a vanishing
    error; at or below that boundary the comparison is rejected.  Returns
    the largest TV distance across the common sizes.
    """
    from .stats import total_variation

    if cfg_uncond.alpha is not None and not math.isinf(cfg_uncond.alpha):
        raise ConfigError("cfg_uncond must have no (finite) truncation")
    if cfg_cond.alpha is None:
        raise ConfigError("cfg_cond must set alpha")
    if cfg_uncond.tau != cfg_cond.tau:
        raise ConfigError("both configs must share tau")
    if cfg_uncond.n_list != cfg_cond.n_list:
        raise ConfigError("both configs must share n_list")
    if cfg_uncond.cutoff != cfg_cond.cutoff:
        raise ConfigError("both configs must share the cutoff")
    boundary = 1.0 / (cfg_cond.tau - 1.0)
    if not cfg_cond.alpha > boundary:
        raise ConfigError(
            f"alpha={cfg_cond.alpha} is at or below the coupling boundary "
            f"1/(tau-1) = {boundary}; the conditioned model only matches the "
            "unconditioned one strictly above it"
        )

    sum_u, _ = run_experiment(cfg_uncond)
    sum_c, _ = run_experiment(cfg_cond)
    worst = 0.0
    for n in cfg_uncond.n_list:
        worst = max(worst, total_variation(sum_u.for_n(n).pmf(), sum_c.for_n(n).pmf()))
    return worst


# -- serialization -----------------------------------------------------------


def _fmt(x: float) -> str:
    return repr(float(x))


def write_replica_csv(outcomes: list[ReplicaOutcome], path) -> None:
    """Per-replica CSV; deterministic for a fixed config (no wall times)."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(REPLICA_CSV_HEADER)
        for o in outcomes:
            fl = o.flags
            w.writerow([
                o.size_index,
                o.n,
                o.replica,
                o.bucket if o.bucket is not None else "",
                o.total,
                o.d1,
                o.d2,
                _fmt(o.ratios[0]) if len(o.ratios) > 0 else "",
                _fmt(o.ratios[1]) if len(o.ratios) > 1 else "",
                int(fl.endpoints_to_giants) if fl is not None else "",
                int(fl.giants_complete) if fl is not None else "",
                int(fl.endpoints_bounded) if fl is not None else "",
                int(fl.certified) if fl is not None else "",
                _fmt(o.giant_mass) if o.giant_mass is not None else "",
                int(o.parity_corrected),
                int(o.failed),
            ])


def write_summary_json(summary: SummaryTable, path) -> None:
    with open(path, "w") as f:
        json.dump(summary.to_json_dict(), f, indent=2, sort_keys=True)
        f.write("\n")


def write_histogram_tsvs(summary: SummaryTable, outdir) -> list[Path]:
    """One bucket/probability TSV per size; returns the written paths."""
    outdir = Path(outdir)
    paths = []
    for s in summary.sizes:
        path = outdir / f"hist_N{s.n}.tsv"
        pmf = s.pmf()
        with open(path, "w") as f:
            f.write("bucket\tprobability\n")
            for label in bucket_labels(summary.config.cutoff):
                f.write(f"{label}\t{_fmt(pmf.get(label, 0.0))}\n")
        paths.append(path)
    return paths
