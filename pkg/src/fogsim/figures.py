"""Experiment runners for the comparative figures: per-scheme CCDFs, delay
vs proactiveness, delay and hit rate vs Zipf skew, delay vs traffic."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import metrics
from .config import ScenarioConfig
from .engine import Engine

PROACTIVENESS_GRID = (0.0, 1.0 / 12.0, 1.0 / 6.0, 1.0 / 4.0, 1.0 / 3.0)
ZIPF_GRID = (0.3, 0.6, 0.9, 1.2)
TRAFFIC_GRID = (3.0, 6.0, 9.0, 12.0, 15.0, 18.0)
FIGURES = ("fig2", "fig3", "fig4", "fig5")

# Long horizons with warmup at half the run: the congested baselines take
# tens of simulated seconds to reach their developed state.
FIGURE_RUN_DEFAULTS = {
    "fig2": dict(n_slots=260_000, warmup_slots=130_000),
    "fig3": dict(n_slots=240_000, warmup_slots=120_000),
    "fig4": dict(n_slots=90_000, warmup_slots=30_000),
    "fig5": dict(n_slots=200_000, warmup_slots=100_000),
}
DEFAULT_SEEDS = (1, 2, 3, 4, 5)


def storage_for_proactiveness(p: float, n_cacheable: int) -> int:
    return int(np.floor(p * n_cacheable + 0.5))


def scheme_label(cfg: ScenarioConfig) -> str:
    if cfg.scheme != "proposed":
        return cfg.scheme
    p = cfg.proactiveness
    for num, den in ((1, 3), (1, 6), (1, 4), (1, 12)):
        if abs(p - num / den) < 1e-9:
            return f"proposed_{num}_{den}"
    return f"proposed_p{p:.3f}"


@dataclass
class PointResult:
    label: str
    config: ScenarioConfig
    summary: metrics.RunSummary
    delay_samples: Optional[list] = None


def _run_point(args) -> PointResult:
    label, cfg, want_samples = args
    result = Engine(cfg).run()
    summary = metrics.summarize(result.rows, cfg)
    samples = metrics.measured_samples(result.rows, cfg) if want_samples else None
    return PointResult(label=label, config=cfg, summary=summary, delay_samples=samples)


def run_grid(points, jobs: int = 1, want_samples: bool = False) -> list:
    """Run (label, config) points, optionally in parallel; order preserved."""
    tasks = [(label, cfg, want_samples) for label, cfg in points]
    if jobs <= 1 or len(tasks) <= 1:
        return [_run_point(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_point, tasks))


def _apply_run_defaults(base: ScenarioConfig, figure: str) -> ScenarioConfig:
    """Figure-specific horizons apply only where the caller kept the generic
    defaults; explicit --set overrides win."""
    generic = ScenarioConfig()
    kw = {k: v for k, v in FIGURE_RUN_DEFAULTS[figure].items()
          if getattr(base, k) == getattr(generic, k)}
    return base.replace(**kw) if kw else base


def fig2_points(base: ScenarioConfig, seeds) -> list:
    cfg = _apply_run_defaults(base, "fig2")
    n_c = cfg.n_cacheable
    points = []
    for seed in seeds:
        for scheme, slots in (("proposed", storage_for_proactiveness(1 / 3, n_c)),
                              ("proposed", storage_for_proactiveness(1 / 6, n_c)),
                              ("baseline1", cfg.storage_slots),
                              ("baseline2", cfg.storage_slots)):
            c = cfg.replace(scheme=scheme, storage_slots=slots, seed=seed)
            points.append((scheme_label(c), c))
    return points


def fig3_points(base: ScenarioConfig, seeds) -> list:
    cfg = _apply_run_defaults(base, "fig3")
    n_c = cfg.n_cacheable
    points = []
    for seed in seeds:
        for p in PROACTIVENESS_GRID:
            c = cfg.replace(scheme="proposed", seed=seed,
                            storage_slots=storage_for_proactiveness(p, n_c))
            points.append((f"proposed@{p:.6f}", c))
        for scheme in ("baseline1", "baseline2"):
            points.append((scheme, cfg.replace(scheme=scheme, seed=seed)))
    return points


def fig4_points(base: ScenarioConfig, seeds) -> list:
    cfg = _apply_run_defaults(base, "fig4")
    n_c = cfg.n_cacheable
    points = []
    for seed in seeds:
        for z in ZIPF_GRID:
            for p in PROACTIVENESS_GRID:
                c = cfg.replace(scheme="proposed", seed=seed, zipf_z=z,
                                storage_slots=storage_for_proactiveness(p, n_c))
                points.append((f"proposed@z{z}@p{p:.6f}", c))
    return points


def fig5_points(base: ScenarioConfig, seeds) -> list:
    cfg = _apply_run_defaults(base, "fig5")
    n_c = cfg.n_cacheable
    points = []
    for seed in seeds:
        for traffic in TRAFFIC_GRID:
            for scheme, slots in (("proposed", storage_for_proactiveness(1 / 3, n_c)),
                                  ("baseline1", cfg.storage_slots),
                                  ("baseline2", cfg.storage_slots)):
                c = cfg.replace(scheme=scheme, storage_slots=slots, seed=seed,
                                traffic_intensity_mbps=traffic)
                points.append((scheme_label(c), c))
    return points


def _group(results, key_fn):
    grouped: dict = {}
    for r in results:
        grouped.setdefault(key_fn(r), []).append(r)
    return grouped


def write_fig2(results, out_dir: str, grid) -> None:
    series = []
    for r in results:
        points = metrics.ccdf(r.delay_samples, grid)
        series.append((r.label, r.config.seed, points))
    metrics.write_ccdf_csv(series, os.path.join(out_dir, "ccdf.csv"))
    metrics.write_summary_csv([r.summary for r in results],
                              os.path.join(out_dir, "summary.csv"),
                              {i: r.label for i, r in enumerate(results)})


def write_fig3(results, out_dir: str) -> None:
    points = []
    grouped = _group(results, lambda r: r.label)
    for label in sorted(grouped):
        rs = grouped[label]
        scheme = rs[0].summary.scheme
        if scheme == "proposed":
            axis_value = rs[0].summary.proactiveness
            points.append((axis_value, "proposed", rs[0].summary.zipf_z,
                           [r.summary for r in rs]))
        else:
            # baselines are proactiveness-independent; replicate across the axis
            for p in PROACTIVENESS_GRID:
                points.append((p, scheme, rs[0].summary.zipf_z, [r.summary for r in rs]))
    points.sort(key=lambda p: (p[1], p[0]))
    metrics.write_sweep_csv("proactiveness", points,
                            os.path.join(out_dir, "sweep_proactiveness.csv"))
    metrics.write_summary_csv([r.summary for r in results],
                              os.path.join(out_dir, "summary.csv"),
                              {i: r.label for i, r in enumerate(results)})


def write_fig4(results, out_dir: str) -> None:
    points = []
    grouped = _group(results, lambda r: (r.summary.zipf_z, r.summary.proactiveness))
    for (z, p) in sorted(grouped):
        rs = grouped[(z, p)]
        points.append((p, "proposed", z, [r.summary for r in rs]))
    metrics.write_sweep_csv("proactiveness", points,
                            os.path.join(out_dir, "sweep_proactiveness.csv"))
    metrics.write_summary_csv([r.summary for r in results],
                              os.path.join(out_dir, "summary.csv"))


def write_fig5(results, out_dir: str) -> None:
    points = []
    grouped = _group(results, lambda r: (r.label, r.summary.traffic_mbps))
    for (label, traffic) in sorted(grouped):
        rs = grouped[(label, traffic)]
        points.append((traffic, label, rs[0].summary.zipf_z, [r.summary for r in rs]))
    metrics.write_sweep_csv("traffic_intensity_mbps", points,
                            os.path.join(out_dir, "sweep_traffic_intensity_mbps.csv"))
    metrics.write_summary_csv([r.summary for r in results],
                              os.path.join(out_dir, "summary.csv"),
                              {i: r.label for i, r in enumerate(results)})


def reproduce_figure(figure: str, base: ScenarioConfig, out_dir: str,
                     seeds=DEFAULT_SEEDS, jobs: int = 1) -> list:
    """Run one figure's experiment grid and write its CSV artifacts."""
    if figure not in FIGURES:
        raise ValueError(f"unknown figure {figure!r}; expected one of {FIGURES}")
    os.makedirs(out_dir, exist_ok=True)
    builders = {"fig2": fig2_points, "fig3": fig3_points,
                "fig4": fig4_points, "fig5": fig5_points}
    points = builders[figure](base, seeds)
    results = run_grid(points, jobs=jobs, want_samples=figure == "fig2")
    if figure == "fig2":
        write_fig2(results, out_dir, metrics.default_ccdf_grid(base))
    elif figure == "fig3":
        write_fig3(results, out_dir)
    elif figure == "fig4":
        write_fig4(results, out_dir)
    else:
        write_fig5(results, out_dir)
    return results
