import numpy as np
import pytest
from scipy import stats

from fogsim.config import ConfigError, ScenarioConfig
from fogsim.rng import RandomSource
from fogsim.scenario import ZipfProfile, generate_scenario, sample_arrivals


def make(**kw):
    cfg = ScenarioConfig(**kw)
    return cfg, generate_scenario(cfg, RandomSource(cfg.seed))


def test_cacheable_count_exact():
    # one third of 90 tasks -> exactly 30 cacheable
    _, (_, _, tasks, _) = make()
    assert sum(t.cacheable for t in tasks) == 30


def test_no_cacheable_when_fraction_zero():
    _, (_, _, tasks, _) = make(cacheable_fraction=0.0)
    assert sum(t.cacheable for t in tasks) == 0


def test_arrival_rate_solves_traffic():
    cfg, (uns, _, _, _) = make()
    lam = uns[0].arrival_rate_per_s
    assert lam == pytest.approx(1.0)  # 9 Mbps / (90 UNs * 0.1 Mbit)
    total = sum(u.arrival_rate_per_s for u in uns) * cfg.mean_task_size_bits
    assert total == pytest.approx(cfg.traffic_bits_per_s)


def test_positions_inside_area():
    cfg, (uns, cloudlets, _, _) = make()
    for ent in list(uns) + list(cloudlets):
        assert 0.0 <= ent.position[0] <= cfg.area_side_m
        assert 0.0 <= ent.position[1] <= cfg.area_side_m


def test_profiles_are_permutations():
    cfg, (uns, _, _, profiles) = make()
    assert len(profiles) == cfg.n_profiles
    for p in profiles:
        assert sorted(p.ranking.tolist()) == list(range(cfg.n_tasks))
    assert {u.popularity_profile_id for u in uns} <= set(range(cfg.n_profiles))


def test_generation_is_pure_function_of_seed():
    _, (uns_a, cls_a, tasks_a, profs_a) = make(seed=42)
    _, (uns_b, cls_b, tasks_b, profs_b) = make(seed=42)
    for a, b in zip(uns_a, uns_b):
        assert np.array_equal(a.position, b.position)
        assert a.popularity_profile_id == b.popularity_profile_id
    for a, b in zip(cls_a, cls_b):
        assert np.array_equal(a.position, b.position)
    assert [t.cacheable for t in tasks_a] == [t.cacheable for t in tasks_b]
    for a, b in zip(profs_a, profs_b):
        assert np.array_equal(a.ranking, b.ranking)


def test_rejects_degenerate_configs():
    for bad in (dict(n_tasks=0), dict(area_side_m=0.0), dict(n_uns=1)):
        with pytest.raises(ConfigError):
            make(**bad)


def test_zipf_zero_exponent_uniform():
    # z = 0: empirical task frequencies uniform within 3 sigma over 1e5 draws
    rng = np.random.default_rng(1)
    profile = ZipfProfile(ranking=np.arange(90), z=0.0)
    draws = profile.sample(rng.random(100_000))
    counts = np.bincount(draws, minlength=90)
    expected = 100_000 / 90
    sigma = np.sqrt(expected * (1 - 1 / 90))
    assert np.all(np.abs(counts - expected) < 3 * sigma + 1e-9) or \
        np.sum(np.abs(counts - expected) >= 3 * sigma) <= 2  # a couple of 3-sigma outliers allowed


def test_zipf_rank_ratio():
    # z=0.6: rank-1 to rank-2 frequency ratio ~ 2^0.6 = 1.5157 within 5% over 1e6 draws
    rng = np.random.default_rng(2)
    ranking = np.random.default_rng(7).permutation(90)
    profile = ZipfProfile(ranking=ranking, z=0.6)
    draws = profile.sample(rng.random(1_000_000))
    counts = np.bincount(draws, minlength=90)
    ratio = counts[ranking[0]] / counts[ranking[1]]
    assert abs(ratio - 1.515716566510398) / 1.515716566510398 < 0.05


def test_zipf_goodness_of_fit():
    # chi-square GOF against (1/i^z)/sum at 1e6 samples, p > 0.01
    rng = np.random.default_rng(3)
    profile = ZipfProfile(ranking=np.arange(90), z=0.6)
    n = 1_000_000
    draws = profile.sample(rng.random(n))
    counts = np.bincount(draws, minlength=90)
    expected = profile.pmf * n
    _, p = stats.chisquare(counts, expected)
    assert p > 0.01


def test_sample_arrivals_null_process():
    cfg, (uns, _, _, profiles) = make()
    un = uns[0]
    un.arrival_rate_per_s = 0.0
    rand = RandomSource(9)
    for slot in range(200):
        assert sample_arrivals(un, slot, profiles[un.popularity_profile_id], cfg, rand) == []


def test_sample_arrivals_statistics():
    cfg, (uns, _, _, profiles) = make()
    un = uns[0]
    un.arrival_rate_per_s = 40.0  # inflate so a short window gives counts
    rand = RandomSource(11)
    profile = profiles[un.popularity_profile_id]
    reqs = []
    n_slots = 20_000
    for slot in range(n_slots):
        reqs.extend(sample_arrivals(un, slot, profile, cfg, rand))
    count = len(reqs)
    lam_total = 40.0 * cfg.slot_duration_s * n_slots
    assert abs(count - lam_total) < 4 * np.sqrt(lam_total)
    sizes = np.array([r.size_bits for r in reqs])
    assert abs(sizes.mean() - cfg.mean_task_size_bits) < 4 * cfg.mean_task_size_bits / np.sqrt(count)
    assert all(r.remaining_bits == r.size_bits for r in reqs)


def test_sample_arrivals_rejects_negative_slot():
    cfg, (uns, _, _, profiles) = make()
    with pytest.raises(ValueError):
        sample_arrivals(uns[0], -1, profiles[0], cfg, RandomSource(1))
