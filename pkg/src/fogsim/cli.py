"""Command-line entry point: single runs, sweeps, figure reproduction and
the matching stability fuzzer."""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__, figures, metrics, stability
from .config import ConfigError, ScenarioConfig, apply_overrides, dump_config, load_config
from .engine import Engine, EngineError, write_request_log
from .matching import LOCAL, Matching, UnPreference, find_blocking_pairs

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INVARIANT = 2


def _parse_seeds(args) -> list:
    if args.seeds:
        lo, _, hi = args.seeds.partition("..")
        if hi:
            return list(range(int(lo), int(hi) + 1))
        return [int(s) for s in args.seeds.split(",")]
    return [args.seed]


def _build_config(args) -> ScenarioConfig:
    cfg = ScenarioConfig()
    if args.config:
        cfg = load_config(args.config, base=cfg)
    if args.set:
        cfg = apply_overrides(cfg, args.set)
    return cfg


def _prepare_out_dir(path: str, force: bool) -> None:
    if os.path.isdir(path) and os.listdir(path) and not force:
        raise ConfigError(f"output directory {path!r} is not empty (use --force to overwrite)")
    os.makedirs(path, exist_ok=True)


def _write_meta(out_dir: str, command: str, seeds, args) -> None:
    meta = {
        "tool": "fogsim",
        "version": __version__,
        "command": command,
        "seeds": list(seeds),
        "overrides": args.set or [],
        "config_file": args.config,
    }
    with open(os.path.join(out_dir, "run_meta.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_run(args) -> int:
    cfg = _build_config(args)
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    cfg.validate()
    _prepare_out_dir(args.out, args.force)
    diagnostics = os.path.join(args.out, "diagnostics") if args.diagnostics else None
    result = Engine(cfg, diagnostics_dir=diagnostics).run()
    write_request_log(result.rows, os.path.join(args.out, "request_log.csv"))
    summary = metrics.summarize(result.rows, cfg)
    metrics.write_summary_csv([summary], os.path.join(args.out, "summary.csv"))
    samples = metrics.measured_samples(result.rows, cfg)
    if samples:
        grid = metrics.default_ccdf_grid(cfg)
        metrics.write_ccdf_csv([(cfg.scheme, cfg.seed, metrics.ccdf(samples, grid))],
                               os.path.join(args.out, "ccdf.csv"))
    dump_config(cfg, os.path.join(args.out, "resolved_config.json"))
    _write_meta(args.out, "run", [cfg.seed], args)
    print(f"run complete: {result.counters['completed']} requests completed, "
          f"{result.counters['cache_served']} cache-served; outputs in {args.out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _build_config(args)
    seeds = _parse_seeds(args)
    values = [float(v) for v in args.values.split(",")]
    schemes = args.schemes.split(",")
    _prepare_out_dir(args.out, args.force)
    points = []
    for seed in seeds:
        for value in values:
            for scheme in schemes:
                c = cfg.replace(seed=seed, scheme=scheme)
                c = apply_overrides(c, [f"{args.axis}={value}"])
                c.validate()
                points.append((f"{scheme}@{value}", c))
    results = figures.run_grid(points, jobs=args.jobs)
    grouped: dict = {}
    for r in results:
        key = (r.label, getattr(r.config, args.axis))
        grouped.setdefault(key, []).append(r.summary)
    sweep_points = [(float(value), label.split("@")[0], summaries[0].zipf_z, summaries)
                    for (label, value), summaries in sorted(grouped.items())]
    metrics.write_sweep_csv(args.axis, sweep_points,
                            os.path.join(args.out, f"sweep_{args.axis}.csv"))
    metrics.write_summary_csv([r.summary for r in results],
                              os.path.join(args.out, "summary.csv"))
    dump_config(cfg, os.path.join(args.out, "resolved_config.json"))
    _write_meta(args.out, "sweep", seeds, args)
    print(f"sweep complete: {len(results)} runs; outputs in {args.out}")
    return EXIT_OK


def cmd_reproduce_figure(args) -> int:
    cfg = _build_config(args)
    seeds = _parse_seeds(args)
    _prepare_out_dir(args.out, args.force)
    figures.reproduce_figure(args.figure, cfg, args.out, seeds=seeds, jobs=args.jobs)
    dump_config(cfg, os.path.join(args.out, "resolved_config.json"))
    _write_meta(args.out, f"reproduce-figure:{args.figure}", seeds, args)
    print(f"{args.figure} data written to {args.out}")
    return EXIT_OK


def _check_matching_file(path: str) -> int:
    """Verify a supplied matching for a supplied instance; exit 2 if unstable."""
    with open(path, "r", encoding="utf-8") as fh:
        spec = json.load(fh)
    prefs = [UnPreference(un_id=int(u), request=None,
                          ranked_options=[int(e) for e in options])
             for u, options in sorted(spec["preferences"].items(), key=lambda kv: int(kv[0]))]
    scores = spec["scores"]

    def score_fn(u, e):
        s = scores[u][e]
        return None if s is None else float(s)

    matching = Matching()
    for u, option in spec["matching"].items():
        u = int(u)
        option = int(option)
        matching.pairs[u] = option
        if option != LOCAL:
            matching.reverse[option] = u
    blocking = find_blocking_pairs(matching, prefs, score_fn)
    if blocking:
        print(f"unstable: blocking pairs {blocking}")
        return EXIT_INVARIANT
    print("stable: no blocking pairs")
    return EXIT_OK


def cmd_fuzz_stability(args) -> int:
    if args.check:
        return _check_matching_file(args.check)
    report = stability.run_fuzz(args.instances, args.max_size, args.seed)
    if report["failures"]:
        first = report["failures"][0]
        print(f"FAIL: {len(report['failures'])}/{report['instances']} instances "
              f"violated stability; first failure: instance {first[0]}: {first[1]}")
        return EXIT_INVARIANT
    print(f"ok: {report['instances']} fuzzed instances stable, "
          f"in the enumerated stable set, and proposer-optimal")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fogsim",
        description="Seeded fog-network simulator: proactive result caching "
                    "and delay-constrained task matching.")
    parser.add_argument("--version", action="version", version=f"fogsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_out=True):
        p.add_argument("--config", help="JSON config file (all fields optional)")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config field (repeatable)")
        if needs_out:
            p.add_argument("--out", required=True, help="output directory")
            p.add_argument("--force", action="store_true",
                           help="allow writing into a non-empty directory")

    p_run = sub.add_parser("run", help="run one scenario and write its logs")
    common(p_run)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--diagnostics", action="store_true",
                       help="dump clustering diagnostics CSVs")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="sweep one config axis across seeds")
    common(p_sweep)
    p_sweep.add_argument("--axis", required=True, help="config field to sweep")
    p_sweep.add_argument("--values", required=True, help="comma-separated axis values")
    p_sweep.add_argument("--schemes", default="proposed",
                         help="comma-separated schemes to run per point")
    p_sweep.add_argument("--seed", type=int, default=1)
    p_sweep.add_argument("--seeds", help="N..M inclusive range or comma list")
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.set_defaults(func=cmd_sweep)

    p_fig = sub.add_parser("reproduce-figure",
                           help="run the experiment grid behind one figure")
    p_fig.add_argument("figure", choices=list(figures.FIGURES))
    common(p_fig)
    p_fig.add_argument("--seed", type=int, default=1)
    p_fig.add_argument("--seeds", default="1..5", help="N..M inclusive range or comma list")
    p_fig.add_argument("--jobs", type=int, default=1)
    p_fig.set_defaults(func=cmd_reproduce_figure)

    p_fuzz = sub.add_parser("fuzz-stability",
                            help="fuzz deferred acceptance against a brute-force oracle")
    p_fuzz.add_argument("--instances", type=int, default=1000)
    p_fuzz.add_argument("--max-size", type=int, default=6)
    p_fuzz.add_argument("--seed", type=int, default=7)
    p_fuzz.add_argument("--check", metavar="FILE",
                        help="verify a JSON instance+matching file instead of fuzzing")
    p_fuzz.set_defaults(func=cmd_fuzz_stability)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except EngineError as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
