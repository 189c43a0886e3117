"""Aggregation of completed-request logs into delay/reliability/hit-rate
figures of merit, plus the CSV contracts consumed by the plotting tool."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import ScenarioConfig

SUMMARY_HEADER = ["scheme", "seed", "proactiveness", "zipf_z", "traffic_mbps",
                  "n_measured", "n_local", "n_cloudlet", "n_cache",
                  "avg_total_delay_s", "avg_offloaded_delay_s",
                  "reliability_violation_rate", "cache_hit_rate"]
CCDF_HEADER = ["threshold", "probability", "scheme", "seed"]
SWEEP_METRICS = ["avg_total_delay_s", "avg_offloaded_delay_s",
                 "reliability_violation_rate", "cache_hit_rate"]


@dataclass
class RunSummary:
    scheme: str
    seed: int
    proactiveness: float
    zipf_z: float
    traffic_mbps: float
    n_measured: int
    n_local: int
    n_cloudlet: int
    n_cache: int
    avg_total_delay_s: Optional[float]
    avg_offloaded_delay_s: Optional[float]
    reliability_violation_rate: Optional[float]
    cache_hit_rate: Optional[float]


def ccdf(samples, grid) -> list:
    """Complementary CDF Pr(X > threshold) on an ascending grid."""
    if len(samples) == 0:
        raise ValueError("ccdf of an empty sample set is undefined")
    grid = list(grid)
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("threshold grid must be ascending")
    xs = np.sort(np.asarray(samples, dtype=float))
    n = len(xs)
    out = []
    for g in grid:
        above = n - int(np.searchsorted(xs, g, side="right"))
        out.append((float(g), above / n))
    return out


def _measured(rows, config: ScenarioConfig):
    return [r for r in rows if r.slot >= config.warmup_slots]


def hit_rate(rows) -> Optional[float]:
    """Cache-served fraction of requests for cacheable tasks; None when no
    cacheable request was measured."""
    cacheable = [r for r in rows if r.cacheable]
    if not cacheable:
        return None
    hits = sum(1 for r in cacheable if r.hit)
    return hits / len(cacheable)


def summarize(rows, config: ScenarioConfig) -> RunSummary:
    """Aggregate one run's log over the measured (post-warmup) window.

    Means use exact summation so the summary is invariant to row order.
    """
    window = _measured(rows, config)
    n = len(window)
    local = [r for r in window if r.served_by == "local"]
    offloaded = [r for r in window if r.served_by.startswith("cloudlet")]
    cached = [r for r in window if r.hit]
    avg_total = math.fsum(r.total_s for r in window) / n if n else None
    avg_off = (math.fsum(r.total_s for r in offloaded) / len(offloaded)
               if offloaded else None)
    violation = (sum(1 for r in offloaded if r.total_s >= config.delay_threshold_s)
                 / len(offloaded)) if offloaded else None
    return RunSummary(
        scheme=config.scheme, seed=config.seed,
        proactiveness=config.proactiveness, zipf_z=config.zipf_z,
        traffic_mbps=config.traffic_intensity_mbps,
        n_measured=n, n_local=len(local), n_cloudlet=len(offloaded),
        n_cache=len(cached),
        avg_total_delay_s=avg_total, avg_offloaded_delay_s=avg_off,
        reliability_violation_rate=violation, cache_hit_rate=hit_rate(window))


def measured_samples(rows, config: ScenarioConfig, offloaded_only: bool = False):
    window = _measured(rows, config)
    if offloaded_only:
        window = [r for r in window if r.served_by.startswith("cloudlet")]
    return [r.total_s for r in window]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_summary_csv(summaries, path: str, label_overrides=None) -> None:
    """One row per run. `label_overrides` optionally maps a summary's index
    to a display scheme label (e.g. proposed_1_3 for figure series)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(SUMMARY_HEADER)
        for i, s in enumerate(summaries):
            scheme = s.scheme
            if label_overrides and i in label_overrides:
                scheme = label_overrides[i]
            w.writerow([scheme, s.seed, _cell(s.proactiveness), _cell(s.zipf_z),
                        _cell(s.traffic_mbps), s.n_measured, s.n_local,
                        s.n_cloudlet, s.n_cache, _cell(s.avg_total_delay_s),
                        _cell(s.avg_offloaded_delay_s),
                        _cell(s.reliability_violation_rate), _cell(s.cache_hit_rate)])


def write_ccdf_csv(series, path: str) -> None:
    """`series` is a list of (scheme_label, seed, [(threshold, probability)])."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(CCDF_HEADER)
        for scheme, seed, points in series:
            for threshold, probability in points:
                w.writerow([repr(threshold), repr(probability), scheme, seed])


def sweep_rows(axis_name: str, points) -> list:
    """Aggregate per-seed summaries into mean +/- sample std rows.

    `points` is a list of (axis_value, scheme_label, zipf_z, [RunSummary]).
    A single seed yields std 0; undefined metrics stay blank.
    """
    header = ["axis", "axis_value", "scheme", "zipf_z", "n_seeds"]
    for m in SWEEP_METRICS:
        header += [f"{m}_mean", f"{m}_std"]
    rows = [header]
    for axis_value, scheme, zipf_z, summaries in points:
        if not summaries:
            raise ValueError("each sweep point needs at least one seed")
        row = [axis_name, _cell(float(axis_value)), scheme, _cell(float(zipf_z)),
               len(summaries)]
        for m in SWEEP_METRICS:
            values = [getattr(s, m) for s in summaries]
            defined = [v for v in values if v is not None]
            if len(defined) != len(values) and defined:
                raise ValueError(f"ragged metric {m}: defined for only some seeds")
            if not defined:
                row += ["", ""]
                continue
            mean = float(np.mean(defined))
            std = float(np.std(defined, ddof=1)) if len(defined) > 1 else 0.0
            row += [repr(mean), repr(std)]
        rows.append(row)
    return rows


def write_sweep_csv(axis_name: str, points, path: str) -> None:
    rows = sweep_rows(axis_name, points)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        csv.writer(fh).writerows(rows)


def default_ccdf_grid(config: ScenarioConfig) -> np.ndarray:
    """Log grid from 0.1 ms to 10 s; includes the delay threshold exactly."""
    grid = np.logspace(-4, 1, 51)
    if config.delay_threshold_s not in grid:
        grid = np.sort(np.append(grid, config.delay_threshold_s))
    return grid
