import numpy as np
import pytest

from fogsim.caching import AdmitOutcome, CacheStore


def store(capacity, xi, cacheable=None):
    cacheable = frozenset(cacheable if cacheable is not None else xi)
    s = CacheStore(capacity=capacity, cacheable_ids=cacheable)
    s.rebind_popularity(list(xi))
    return s


def brute_force_top_k(seen, rank_of, capacity):
    """Heredity oracle: the cache must equal the most popular
    min(capacity, |seen|) distinct tasks ever admitted."""
    ranked = sorted(set(seen), key=lambda t: rank_of[t])
    return set(ranked[:capacity])


def test_lookup_empty():
    s = store(4, [0, 1, 2, 3])
    assert all(not s.lookup(t) for t in range(4))


def test_admit_then_lookup():
    s = store(2, [0, 1, 2])
    assert s.admit(1).outcome is AdmitOutcome.INSERTED
    assert s.lookup(1)


def test_non_cacheable_rejected_and_never_cached():
    s = store(2, [0, 1], cacheable=[0, 1])
    res = s.admit(99)
    assert res.outcome is AdmitOutcome.REJECTED
    assert not s.lookup(99)


def test_duplicate_admit_is_idempotent():
    s = store(2, [0, 1, 2])
    s.admit(2)
    before = set(s.entries)
    assert s.admit(2).outcome is AdmitOutcome.DUPLICATE
    assert s.entries == before


def test_inserts_until_capacity():
    # capacity 2, stream [rank3, rank1]: both inserted
    s = store(2, [10, 11, 12, 13])
    assert s.admit(13).outcome is AdmitOutcome.INSERTED
    assert s.admit(10).outcome is AdmitOutcome.INSERTED
    assert s.entries == {13, 10}


def test_replacement_evicts_less_popular():
    # capacity 1 holding rank3; admitting rank1 replaces it
    s = store(1, [10, 11, 12, 13])
    s.admit(13)
    res = s.admit(10)
    assert res.outcome is AdmitOutcome.REPLACED
    assert res.victim == 13
    assert s.entries == {10}


def test_rejects_when_no_less_popular_resident():
    # capacity 1 holding rank1; admitting rank3 leaves cache unchanged
    s = store(1, [10, 11, 12, 13])
    s.admit(10)
    assert s.admit(13).outcome is AdmitOutcome.REJECTED
    assert s.entries == {10}


def test_zero_capacity_never_stores():
    s = store(0, [0, 1, 2])
    assert s.admit(0).outcome is AdmitOutcome.REJECTED
    assert not s.entries


def test_admit_unranked_cacheable_task_raises():
    s = CacheStore(capacity=2, cacheable_ids=frozenset({0, 1}))
    with pytest.raises(KeyError):
        s.admit(0)


def test_rebind_requires_permutation():
    s = store(2, [0, 1, 2])
    with pytest.raises(ValueError):
        s.rebind_popularity([0, 1])
    with pytest.raises(ValueError):
        s.rebind_popularity([0, 1, 1])


def test_rebind_preserves_entries_and_reverses_evictions():
    xi = [0, 1, 2, 3]
    s = store(1, xi)
    s.admit(2)
    s.rebind_popularity(list(reversed(xi)))  # now 3 is most popular, 0 least
    assert s.entries == {2}
    res = s.admit(3)
    assert res.outcome is AdmitOutcome.REPLACED and res.victim == 2


def test_heredity_oracle_fuzz():
    # capacity never exceeded and entries equal the brute-force top-k of
    # everything admitted, for random rankings and admit streams
    rng = np.random.default_rng(17)
    for trial in range(100):
        n_tasks = int(rng.integers(3, 25))
        capacity = int(rng.integers(1, 8))
        xi = rng.permutation(n_tasks).tolist()
        s = store(capacity, xi)
        seen = []
        for task in rng.integers(0, n_tasks, size=2000).tolist():
            s.admit(task)
            seen.append(task)
            assert len(s.entries) <= capacity
        assert s.entries == brute_force_top_k(seen, s.rank_of, capacity)


def test_heredity_after_rebind():
    # random xi, random admit stream after a rebind: entries equal the
    # oracle top-k under the new ranks (cache starts empty, as in the engine)
    rng = np.random.default_rng(23)
    xi0 = rng.permutation(12).tolist()
    s = store(4, xi0)
    xi1 = rng.permutation(12).tolist()
    s.rebind_popularity(xi1)
    seen = rng.integers(0, 12, size=500).tolist()
    for t in seen:
        s.admit(t)
    assert s.entries == brute_force_top_k(seen, {t: i for i, t in enumerate(xi1)}, 4)


def test_hit_rate_monotone_in_capacity():
    # fixed request stream: hits never decrease as capacity grows
    rng = np.random.default_rng(31)
    weights = (np.arange(1, 21) ** -0.8)
    pmf = weights / weights.sum()
    stream = rng.choice(20, p=pmf, size=4000)
    hits_by_cap = []
    for cap in (1, 2, 4, 8, 16):
        s = store(cap, list(range(20)))
        hits = 0
        for t in stream.tolist():
            if s.lookup(t):
                hits += 1
            else:
                s.admit(t)
        hits_by_cap.append(hits)
    assert all(b >= a for a, b in zip(hits_by_cap, hits_by_cap[1:]))
