"""Command line front door: simulate, limitcheck, diagnose, oracle.

Exit codes are the contract: 0 success, 2 configuration error (including
unknown flags, via argparse), 3 resource failures in more than 10% of the
replicas.  limitcheck additionally exits 1 when a KS distance misses the
configured threshold, diagnose exits 1 if any certified replica has a
hopcount above 3 (which would falsify the structural guarantee).

Options resolve in three layers: built-in defaults, then a flat key=value
config file (--config), then explicit flags.  Every run writes a
manifest.json echoing the fully resolved configuration, master seed
included, so any output directory is self-describing.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from .degree_model import DEFAULT_DEGREE_CAP, sample_sequence, tail_quantile
from .diagnostics import order_stats
from .exact import MAX_ORACLE_STUBS, double_factorial, exact_hopcount_pmf, matching_census
from .limit_laws import MAX_JOINT_RANKS, order_ratio_cdf
from .matching import DEFAULT_STUB_CAP
from .montecarlo import (
    ConfigError,
    ExperimentConfig,
    bucket_labels,
    replica_rng,
    run_experiment,
    write_histogram_tsvs,
    write_replica_csv,
    write_summary_json,
)
from .stats import ks_distance

OUTDIR_ENV = "HEAVYHOP_OUT"

RATIO_GRID = np.round(np.arange(1, 51) * 0.1, 1)  # x = 0.1, 0.2, ..., 5.0


# -- option plumbing ----------------------------------------------------------


def _parse_bool(s: str) -> bool:
    low = s.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_size(tok: str) -> int:
    """One graph size; scientific notation like 1e5 is normalized to int."""
    tok = tok.strip()
    try:
        return int(tok)
    except ValueError:
        pass
    v = float(tok)
    if not math.isfinite(v) or v <= 0 or v != int(v):
        raise ValueError(f"not a whole positive size: {tok!r}")
    return int(v)


def _parse_n_list(s: str) -> tuple[int, ...]:
    toks = [t for t in s.split(",") if t.strip()]
    if not toks:
        raise ValueError("empty size list")
    return tuple(_parse_size(t) for t in toks)


def _parse_alpha(s: str) -> float:
    v = float(s)  # accepts "inf" as the no-truncation sentinel
    return v


def _parse_int_list(s: str) -> tuple[int, ...]:
    toks = [t for t in s.split(",") if t.strip()]
    if not toks:
        raise ValueError("empty list")
    return tuple(int(t) for t in toks)


def read_config_file(path) -> dict[str, str]:
    """Flat key=value lines; blank lines and # comments ignored."""
    out: dict[str, str] = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def _resolve(args, opts: dict[str, tuple]) -> dict:
    """Merge defaults, config file, and flags; flags win."""
    file_cfg: dict[str, str] = {}
    if getattr(args, "config", None):
        try:
            file_cfg = read_config_file(args.config)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}")
    unknown = set(file_cfg) - set(opts)
    if unknown:
        raise ConfigError(f"unknown config file keys: {', '.join(sorted(unknown))}")
    out = {}
    for key, (parse, default) in opts.items():
        value = getattr(args, key, None)
        if value is None and key in file_cfg:
            try:
                value = parse(file_cfg[key])
            except ValueError as exc:
                raise ConfigError(f"config key {key}: {exc}")
        if value is None:
            value = default
        out[key] = value
    missing = [k for k, v in out.items() if v is _REQUIRED]
    if missing:
        raise ConfigError(f"missing required option(s): {', '.join('--' + m for m in missing)}")
    return out


class _Required:
    def __repr__(self):
        return "<required>"


_REQUIRED = _Required()


def _outdir(resolved: dict) -> Path:
    import os

    out = resolved.get("out") or os.environ.get(OUTDIR_ENV) or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_manifest(outdir: Path, subcommand: str, config: dict, outputs: list[str]) -> None:
    doc = {"subcommand": subcommand, "config": config, "outputs": sorted(outputs)}
    with open(outdir / "manifest.json", "w") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


def _progress(args):
    if getattr(args, "quiet", False):
        return None

    def report(i, n, elapsed):
        print(f"  N={n}: done in {elapsed:.1f}s", file=sys.stderr)

    return report


def _emit(line: str) -> None:
    print(line)


# -- simulate -----------------------------------------------------------------

_SIM_OPTS = {
    "tau": (float, _REQUIRED),
    "n": (_parse_n_list, _REQUIRED),
    "replicas": (int, 1000),
    "seed": (int, 0),
    "alpha": (_parse_alpha, None),
    "cutoff": (int, 10),
    "epsilon": (float, 0.5),
    "giants_mode": (str, "topk"),
    "giants_k": (int, 10),
    "collect_flags": (_parse_bool, False),
    "eager": (_parse_bool, False),
    "random_pair": (_parse_bool, False),
    "top_m": (int, 2),
    "stub_cap": (int, DEFAULT_STUB_CAP),
    "degree_cap": (int, DEFAULT_DEGREE_CAP),
    "plot": (_parse_bool, True),
    "out": (str, None),
}


def _experiment_config(r: dict) -> ExperimentConfig:
    return ExperimentConfig(
        tau=r["tau"],
        n_list=r["n"],
        replicas=r["replicas"],
        master_seed=r["seed"],
        alpha=r["alpha"],
        cutoff=r["cutoff"],
        epsilon=r["epsilon"],
        giants_mode=r["giants_mode"],
        giants_k=r["giants_k"],
        collect_flags=r["collect_flags"],
        lazy=not r["eager"],
        random_pair=r["random_pair"],
        top_m=r["top_m"],
        stub_cap=r["stub_cap"],
        degree_cap=r["degree_cap"],
    )


def cmd_simulate(args) -> int:
    r = _resolve(args, _SIM_OPTS)
    cfg = _experiment_config(r)
    outdir = _outdir(r)

    summary, outcomes = run_experiment(cfg, progress=_progress(args))

    outputs = ["replicas.csv", "summary.json"]
    write_replica_csv(outcomes, outdir / "replicas.csv")
    write_summary_json(summary, outdir / "summary.json")
    for p in write_histogram_tsvs(summary, outdir):
        outputs.append(p.name)
    if r["plot"]:
        from .figures import hopcount_pmf_figure

        hopcount_pmf_figure(summary, outdir / "hopcount_pmf.png")
        outputs.append("hopcount_pmf.png")
    _write_manifest(outdir, "simulate", cfg.to_json_dict(), outputs + ["manifest.json"])

    total = failed = 0
    for s in summary.sizes:
        total += s.replicas
        failed += s.failed
        pmf = s.pmf()
        core = pmf.get("2", 0.0) + pmf.get("3", 0.0)
        p_hat = "n/a" if s.p_hat is None else f"{s.p_hat:.4f}"
        _emit(f"N={s.n}: completed {s.completed}, failed {s.failed}, "
              f"P(H=2)={pmf.get('2', 0.0):.4f}, P(H=3)={pmf.get('3', 0.0):.4f}, "
              f"P(H in {{2,3}})={core:.4f}, p_hat={p_hat}")
    _emit(f"wrote {', '.join(outputs + ['manifest.json'])} to {outdir}")

    if failed > 0.10 * total:
        print(f"error: {failed} of {total} replicas failed on resource limits",
              file=sys.stderr)
        return 3
    return 0


# -- limitcheck ---------------------------------------------------------------

_LIMIT_OPTS = {
    "tau": (float, _REQUIRED),
    "n": (_parse_n_list, _REQUIRED),
    "replicas": (int, 1000),
    "seed": (int, 0),
    "k": (int, 1),
    "threshold": (float, 0.05),
    "plot": (_parse_bool, True),
    "out": (str, None),
}


def cmd_limitcheck(args) -> int:
    r = _resolve(args, _LIMIT_OPTS)
    if len(r["n"]) != 1:
        raise ConfigError("limitcheck takes a single size, got a list")
    k = r["k"]
    if not 1 <= k <= MAX_JOINT_RANKS:
        raise ConfigError(f"k must lie in 1..{MAX_JOINT_RANKS}, got {k}")
    n = r["n"][0]
    if k > n:
        raise ConfigError(f"k={k} exceeds the number of nodes {n}")
    cfg = ExperimentConfig(tau=r["tau"], n_list=(n,), replicas=r["replicas"],
                           master_seed=r["seed"], top_m=k)
    outdir = _outdir(r)

    # Only the degree sequences matter here; no matching is built.
    law = cfg.law
    ratios = np.empty((cfg.replicas, k))
    t0 = time.perf_counter()
    for rep in range(cfg.replicas):
        rng = replica_rng(cfg, 0, rep)
        seq = sample_sequence(law, n, rng)
        ratios[rep] = order_stats(seq, law, m=k).ratios
    if not getattr(args, "quiet", False):
        print(f"  sampled {cfg.replicas} sequences at N={n} "
              f"in {time.perf_counter() - t0:.1f}s", file=sys.stderr)

    empirical = np.empty((k, RATIO_GRID.size))
    analytic = np.empty((k, RATIO_GRID.size))
    ks = {}
    for rank in range(1, k + 1):
        col = ratios[:, rank - 1]
        empirical[rank - 1] = np.searchsorted(np.sort(col), RATIO_GRID, side="right") / col.size
        analytic[rank - 1] = [order_ratio_cdf(cfg.tau, rank, float(x)) for x in RATIO_GRID]
        ks[rank] = ks_distance(col, lambda x, rk=rank: order_ratio_cdf(cfg.tau, rk, x))

    with open(outdir / "ratio_cdf.tsv", "w") as f:
        cols = [f"{w}_rank{i}" for i in range(1, k + 1) for w in ("empirical", "limit")]
        f.write("x\t" + "\t".join(cols) + "\n")
        for j, x in enumerate(RATIO_GRID):
            row = [f"{x:.1f}"]
            for i in range(k):
                row.append(repr(float(empirical[i, j])))
                row.append(repr(float(analytic[i, j])))
            f.write("\t".join(row) + "\n")

    ok = all(d <= r["threshold"] for d in ks.values())
    with open(outdir / "ks.json", "w") as f:
        json.dump({"threshold": r["threshold"],
                   "ks": {str(rank): ks[rank] for rank in ks},
                   "pass": ok}, f, indent=2, sort_keys=True)
        f.write("\n")

    outputs = ["ratio_cdf.tsv", "ks.json"]
    if r["plot"]:
        from .figures import ratio_cdf_figure

        ratio_cdf_figure(RATIO_GRID, empirical, analytic, cfg.tau, n,
                         outdir / "ratio_cdf.png")
        outputs.append("ratio_cdf.png")
    config = cfg.to_json_dict()
    config.update({"k": k, "threshold": r["threshold"]})
    _write_manifest(outdir, "limitcheck", config, outputs + ["manifest.json"])

    for rank in range(1, k + 1):
        verdict = "ok" if ks[rank] <= r["threshold"] else "MISS"
        _emit(f"rank {rank}: KS distance {ks[rank]:.4f} vs threshold {r['threshold']:g} [{verdict}]")
    _emit(f"wrote {', '.join(outputs + ['manifest.json'])} to {outdir}")
    return 0 if ok else 1


# -- diagnose -----------------------------------------------------------------

_DIAG_OPTS = {
    "tau": (float, _REQUIRED),
    "n": (_parse_n_list, _REQUIRED),
    "replicas": (int, 1000),
    "seed": (int, 0),
    "alpha": (_parse_alpha, None),
    "cutoff": (int, 10),
    "epsilon": (float, 0.5),
    "giants_mode": (str, "topk"),
    "giants_k": (int, 10),
    "eager": (_parse_bool, True),  # flag evaluation needs whole giant neighborhoods
    "stub_cap": (int, DEFAULT_STUB_CAP),
    "plot": (_parse_bool, True),
    "out": (str, None),
}


def _is_violation(outcome) -> bool:
    if outcome.failed or outcome.flags is None or not outcome.flags.certified:
        return False
    return not (outcome.hop.is_exact and outcome.hop.hops <= 3)


def cmd_diagnose(args) -> int:
    r = _resolve(args, _DIAG_OPTS)
    cfg = ExperimentConfig(
        tau=r["tau"], n_list=r["n"], replicas=r["replicas"], master_seed=r["seed"],
        alpha=r["alpha"], cutoff=r["cutoff"], epsilon=r["epsilon"],
        giants_mode=r["giants_mode"], giants_k=r["giants_k"],
        collect_flags=True, lazy=not r["eager"], stub_cap=r["stub_cap"],
    )
    outdir = _outdir(r)

    b = tail_quantile(cfg.law, cfg.epsilon)
    _emit(f"bounded-degree threshold b = {b} "
          f"(smallest degree whose tail falls below epsilon/8 = {cfg.epsilon / 8:g})")

    summary, outcomes = run_experiment(cfg, progress=_progress(args))

    violations = {n: 0 for n in cfg.n_list}
    for o in outcomes:
        if _is_violation(o):
            violations[o.n] += 1
    total_violations = sum(violations.values())

    keys = ["endpoints_to_giants", "giants_complete", "endpoints_bounded", "certified"]
    with open(outdir / "events.tsv", "w") as f:
        f.write("N\treplicas\tcompleted\tfailed\t" + "\t".join(keys)
                + "\tmean_giant_mass\tviolations\n")
        for s in summary.sizes:
            rates = s.event_rates or {}
            cells = [str(s.n), str(s.replicas), str(s.completed), str(s.failed)]
            cells += [repr(float(rates[k])) if k in rates else "" for k in keys]
            cells.append(repr(float(s.mean_giant_mass)) if s.mean_giant_mass is not None else "")
            cells.append(str(violations[s.n]))
            f.write("\t".join(cells) + "\n")

    doc = {"bounded_degree_threshold": b, "violations": total_violations, "sizes": {}}
    for s in summary.sizes:
        doc["sizes"][str(s.n)] = {
            "completed": s.completed,
            "failed": s.failed,
            "event_rates": s.event_rates,
            "mean_giant_mass": s.mean_giant_mass,
            "violations": violations[s.n],
        }
    with open(outdir / "events.json", "w") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")

    outputs = ["events.tsv", "events.json"]
    if r["plot"]:
        from .figures import event_rates_figure

        event_rates_figure(summary, outdir / "event_rates.png")
        outputs.append("event_rates.png")
    config = cfg.to_json_dict()
    _write_manifest(outdir, "diagnose", config, outputs + ["manifest.json"])

    total = failed = 0
    for s in summary.sizes:
        total += s.replicas
        failed += s.failed
        rates = s.event_rates or {}
        parts = ", ".join(f"{k}={rates[k]:.4f}" for k in keys if k in rates)
        _emit(f"N={s.n}: completed {s.completed}, failed {s.failed}, {parts}")
    _emit(f"certified-but-long violations: {total_violations} (must be 0)")
    _emit(f"wrote {', '.join(outputs + ['manifest.json'])} to {outdir}")

    if total_violations > 0:
        return 1
    if failed > 0.10 * total:
        print(f"error: {failed} of {total} replicas failed on resource limits",
              file=sys.stderr)
        return 3
    return 0


# -- oracle -------------------------------------------------------------------

_ORACLE_OPTS = {
    "degrees": (_parse_int_list, _REQUIRED),
    "endpoints": (_parse_int_list, (1, 2)),
    "cutoff": (int, 10),
    "out": (str, None),
}


def _edges_label(matching: tuple[tuple[int, int], ...]) -> str:
    return " ".join(f"{u}-{v}" for u, v in matching)


def cmd_oracle(args) -> int:
    r = _resolve(args, _ORACLE_OPTS)
    degrees = r["degrees"]
    if any(d < 1 for d in degrees):
        raise ConfigError(f"degrees must all be at least 1, got {list(degrees)}")
    total = sum(degrees)
    if total % 2:
        raise ConfigError(f"stub total {total} is odd; no perfect matching exists")
    if total > MAX_ORACLE_STUBS:
        raise ConfigError(
            f"stub total {total} exceeds the exact-enumeration bound {MAX_ORACLE_STUBS}")
    endpoints = r["endpoints"]
    if len(endpoints) != 2 or endpoints[0] == endpoints[1]:
        raise ConfigError(f"endpoints must be two distinct nodes, got {list(endpoints)}")
    a, b = endpoints
    if not (1 <= a <= len(degrees) and 1 <= b <= len(degrees)):
        raise ConfigError(f"endpoints {a},{b} out of range for {len(degrees)} nodes")

    n_matchings = double_factorial(total - 1)
    pmf = exact_hopcount_pmf(degrees, a, b, cutoff=r["cutoff"])
    census = matching_census(degrees)

    _emit(f"degrees {','.join(map(str, degrees))}: {total} stubs, "
          f"{n_matchings} perfect matchings")
    for label, prob in pmf.items():
        _emit(f"P(H({a},{b}) = {label}) = {prob}")
    _emit("matching census:")
    for matching, prob in census.items():
        _emit(f"  {_edges_label(matching)} : {prob}")

    outdir = _outdir(r)
    doc = {
        "degrees": list(degrees),
        "endpoints": [a, b],
        "matchings": n_matchings,
        "hopcount_pmf": {label: str(prob) for label, prob in pmf.items()},
        "census": {_edges_label(m): str(p) for m, p in census.items()},
    }
    with open(outdir / "oracle.json", "w") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")
    config = {"degrees": list(degrees), "endpoints": [a, b], "cutoff": r["cutoff"]}
    _write_manifest(outdir, "oracle", config, ["oracle.json", "manifest.json"])
    _emit(f"wrote oracle.json, manifest.json to {outdir}")
    return 0


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heavyhop",
        description="Hopcount experiments on configuration models with "
                    "infinite-mean power-law degrees.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="subcommand")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE",
                        help="flat key=value config file; flags override it")
    common.add_argument("--out", metavar="DIR",
                        help=f"output directory (default ${OUTDIR_ENV} or .)")
    common.add_argument("--quiet", action="store_true", help="suppress progress lines")

    run_opts = argparse.ArgumentParser(add_help=False)
    run_opts.add_argument("--tau", type=float, help="degree tail exponent, in (1, 2)")
    run_opts.add_argument("--n", type=_parse_n_list, metavar="N[,N...]",
                          help="graph sizes; scientific notation accepted (1e5)")
    run_opts.add_argument("--replicas", type=int, help="replicas per size (default 1000)")
    run_opts.add_argument("--seed", type=int, help="master seed (default 0)")

    p = sub.add_parser("simulate", parents=[common, run_opts],
                       help="run the hopcount experiment grid and write reports")
    p.add_argument("--alpha", type=_parse_alpha,
                   help="condition degrees below N^alpha (inf = sentinel, no truncation)")
    p.add_argument("--cutoff", type=int, help="hopcount search depth limit (default 10)")
    p.add_argument("--epsilon", type=float, help="bounded-endpoint tolerance (default 0.5)")
    p.add_argument("--giants-mode", dest="giants_mode", choices=("topk", "beta"))
    p.add_argument("--giants-k", dest="giants_k", type=int)
    p.add_argument("--collect-flags", dest="collect_flags",
                   action=argparse.BooleanOptionalAction,
                   help="evaluate certificate events per replica")
    p.add_argument("--eager", action=argparse.BooleanOptionalAction,
                   help="build the whole matching up front (default: lazy)")
    p.add_argument("--random-pair", dest="random_pair",
                   action=argparse.BooleanOptionalAction,
                   help="measure a uniform random pair instead of nodes 1 and 2")
    p.add_argument("--top-m", dest="top_m", type=int, help="top degree ratios to record")
    p.add_argument("--stub-cap", dest="stub_cap", type=int)
    p.add_argument("--degree-cap", dest="degree_cap", type=int)
    p.add_argument("--plot", action=argparse.BooleanOptionalAction,
                   help="render hopcount_pmf.png (default: on)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("limitcheck", parents=[common, run_opts],
                       help="compare top degree ratios against the limit law")
    p.add_argument("--k", type=int, help=f"ranks to check, 1..{MAX_JOINT_RANKS} (default 1)")
    p.add_argument("--threshold", type=float, help="KS pass threshold (default 0.05)")
    p.add_argument("--plot", action=argparse.BooleanOptionalAction)
    p.set_defaults(func=cmd_limitcheck)

    p = sub.add_parser("diagnose", parents=[common, run_opts],
                       help="evaluate the short-path certificate events")
    p.add_argument("--alpha", type=_parse_alpha)
    p.add_argument("--cutoff", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--giants-mode", dest="giants_mode", choices=("topk", "beta"))
    p.add_argument("--giants-k", dest="giants_k", type=int)
    p.add_argument("--eager", action=argparse.BooleanOptionalAction,
                   help="eager matchings (default here: on)")
    p.add_argument("--stub-cap", dest="stub_cap", type=int)
    p.add_argument("--plot", action=argparse.BooleanOptionalAction)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("oracle", parents=[common],
                       help="exact small-instance tables by full enumeration")
    p.add_argument("--degrees", type=_parse_int_list, metavar="D[,D...]",
                   help="degree sequence; stub total at most "
                        f"{MAX_ORACLE_STUBS}")
    p.add_argument("--endpoints", type=_parse_int_list, metavar="A,B",
                   help="measured node pair (default 1,2)")
    p.add_argument("--cutoff", type=int)
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
