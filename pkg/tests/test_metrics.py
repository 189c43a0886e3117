import csv

import numpy as np
import pytest

from fogsim.config import ScenarioConfig
from fogsim.engine import CompletedRow
from fogsim.metrics import (CCDF_HEADER, SUMMARY_HEADER, RunSummary, ccdf, hit_rate,
                            measured_samples, summarize, sweep_rows, write_ccdf_csv,
                            write_summary_csv, write_sweep_csv)


def row(slot=5000, un=0, task=0, served_by="cloudlet:1", cacheable=0, hit=0,
        total=0.005, scheme="proposed"):
    return CompletedRow(slot=slot, un=un, task=task, scheme=scheme, served_by=served_by,
                        cacheable=cacheable, hit=hit, transmit_s=0.0, compute_s=0.0,
                        queue_wait_s=0.0, processing_s=0.0, total_s=total)


def test_ccdf_strict_inequality():
    out = dict(ccdf([5.0, 5.0, 5.0], [4.0, 5.0]))
    assert out[4.0] == 1.0
    assert out[5.0] == 0.0


def test_ccdf_midpoint():
    out = dict(ccdf([1.0, 2.0, 3.0, 4.0], [2.5]))
    assert out[2.5] == 0.5


def test_ccdf_below_all_samples():
    out = ccdf([3.0, 9.0], [0.1, 100.0])
    assert out[0] == (0.1, 1.0)
    assert out[1] == (100.0, 0.0)


def test_ccdf_monotone_non_increasing():
    rng = np.random.default_rng(0)
    samples = rng.exponential(1.0, size=500)
    grid = np.linspace(0, 5, 40)
    probs = [p for _, p in ccdf(samples, grid)]
    assert all(b <= a for a, b in zip(probs, probs[1:]))
    assert all(0.0 <= p <= 1.0 for p in probs)


def test_ccdf_rejects_empty_and_unsorted():
    with pytest.raises(ValueError):
        ccdf([], [1.0])
    with pytest.raises(ValueError):
        ccdf([1.0], [2.0, 1.0])


def test_hit_rate_undefined_without_cacheable():
    assert hit_rate([row(cacheable=0)]) is None


def test_hit_rate_all_and_partial():
    rows = [row(cacheable=1, hit=1, served_by="cache:0")] * 3
    assert hit_rate(rows) == 1.0
    rows = ([row(cacheable=1, hit=1, served_by="cache:0")] * 12
            + [row(cacheable=1, hit=0)] * 18)
    assert hit_rate(rows) == pytest.approx(0.4)


def test_summarize_empty_window():
    cfg = ScenarioConfig()
    s = summarize([row(slot=10)], cfg)  # warmup_slots=2000 excludes it
    assert s.n_measured == 0
    assert s.avg_total_delay_s is None
    assert s.avg_offloaded_delay_s is None
    assert s.reliability_violation_rate is None
    assert s.cache_hit_rate is None


def test_summarize_single_row():
    cfg = ScenarioConfig()
    s = summarize([row(total=0.01)], cfg)
    assert s.n_measured == 1
    assert s.avg_total_delay_s == pytest.approx(0.01)
    assert s.n_cloudlet == 1 and s.n_local == 0 and s.n_cache == 0


def test_summarize_row_order_invariance():
    cfg = ScenarioConfig()
    rows = [row(total=0.001 * i, un=i) for i in range(1, 8)]
    a = summarize(rows, cfg)
    b = summarize(list(reversed(rows)), cfg)
    assert a == b


def test_violation_rate_cross_check():
    # violation rate equals an independent recount at the threshold
    cfg = ScenarioConfig()
    rng = np.random.default_rng(1)
    rows = [row(total=float(t)) for t in rng.exponential(0.5, size=400)]
    s = summarize(rows, cfg)
    manual = sum(1 for r in rows if r.total_s >= cfg.delay_threshold_s) / len(rows)
    assert s.reliability_violation_rate == pytest.approx(manual)
    grid_probs = dict(ccdf([r.total_s for r in rows], [cfg.delay_threshold_s]))
    # CCDF is strict (>); violations use >=, so they can only exceed it by ties
    assert s.reliability_violation_rate >= grid_probs[cfg.delay_threshold_s]


def test_counts_partition_measured_set():
    cfg = ScenarioConfig()
    rows = ([row(served_by="local")] * 3
            + [row(served_by="cloudlet:2")] * 4
            + [row(served_by="cache:1", cacheable=1, hit=1)] * 2)
    s = summarize(rows, cfg)
    assert s.n_local + s.n_cloudlet + s.n_cache == s.n_measured == 9


def test_measured_samples_filters():
    cfg = ScenarioConfig()
    rows = [row(slot=0, total=1.0), row(slot=3000, total=2.0),
            row(slot=3001, total=3.0, served_by="local")]
    assert measured_samples(rows, cfg) == [2.0, 3.0]
    assert measured_samples(rows, cfg, offloaded_only=True) == [2.0]


def _summary(value, seed=1, scheme="proposed"):
    return RunSummary(scheme=scheme, seed=seed, proactiveness=1 / 3, zipf_z=0.6,
                      traffic_mbps=9.0, n_measured=10, n_local=1, n_cloudlet=8,
                      n_cache=1, avg_total_delay_s=value, avg_offloaded_delay_s=value,
                      reliability_violation_rate=0.0, cache_hit_rate=0.5)


def test_sweep_single_seed_std_zero():
    rows = sweep_rows("traffic", [(9.0, "proposed", 0.6, [_summary(1.0)])])
    header, data = rows[0], rows[1]
    i = header.index("avg_total_delay_s_mean")
    assert float(data[i]) == 1.0
    assert float(data[i + 1]) == 0.0


def test_sweep_mean_and_sample_std():
    rows = sweep_rows("traffic", [(9.0, "proposed", 0.6,
                                   [_summary(1.0, seed=1), _summary(3.0, seed=2)])])
    header, data = rows[0], rows[1]
    i = header.index("avg_total_delay_s_mean")
    assert float(data[i]) == pytest.approx(2.0)
    assert float(data[i + 1]) == pytest.approx(np.sqrt(2.0))


def test_sweep_identical_seeds_identical_rows():
    point = (9.0, "proposed", 0.6, [_summary(2.0)])
    a = sweep_rows("traffic", [point])
    b = sweep_rows("traffic", [point])
    assert a == b


def test_sweep_rejects_empty_point():
    with pytest.raises(ValueError):
        sweep_rows("traffic", [(9.0, "proposed", 0.6, [])])


def test_csv_headers_are_contract(tmp_path):
    summary_path = tmp_path / "summary.csv"
    write_summary_csv([_summary(1.0)], str(summary_path))
    with open(summary_path) as fh:
        assert next(csv.reader(fh)) == SUMMARY_HEADER

    ccdf_path = tmp_path / "ccdf.csv"
    write_ccdf_csv([("proposed", 1, [(0.1, 0.5)])], str(ccdf_path))
    with open(ccdf_path) as fh:
        assert next(csv.reader(fh)) == CCDF_HEADER

    sweep_path = tmp_path / "sweep_traffic.csv"
    write_sweep_csv("traffic", [(9.0, "proposed", 0.6, [_summary(1.0)])], str(sweep_path))
    with open(sweep_path) as fh:
        header = next(csv.reader(fh))
    assert header[:5] == ["axis", "axis_value", "scheme", "zipf_z", "n_seeds"]
    assert "avg_total_delay_s_mean" in header and "cache_hit_rate_std" in header
