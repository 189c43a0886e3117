"""Fuzz harness for the matching layer: random small instances, brute-force
enumeration of all stable matchings, and verification of deferred-acceptance
output against that enumeration."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .matching import LOCAL, Matching, UnPreference, deferred_acceptance, find_blocking_pairs

_NEG = -1e18  # score stand-in for "unacceptable" in vectorised checks


@dataclass
class FuzzInstance:
    n_uns: int
    n_cloudlets: int
    prefs: list          # UnPreference per UN (ranked cloudlets + LOCAL)
    scores: np.ndarray   # (n_uns, n_cloudlets); NaN marks unacceptable

    def score_fn(self, u: int, e: int):
        s = self.scores[u, e]
        return None if np.isnan(s) else float(s)


def random_instance(rng: np.random.Generator, max_uns: int = 6,
                    max_cloudlets: int = 6) -> FuzzInstance:
    """Random instance with deliberate ties: integer delay estimates and
    integer cloudlet scores exercise both tie-break rules."""
    m = int(rng.integers(1, max_uns + 1))
    n = int(rng.integers(1, max_cloudlets + 1))
    scores = rng.integers(0, 8, size=(m, n)).astype(float)
    scores[rng.random((m, n)) < 0.25] = np.nan
    prefs = []
    for u in range(m):
        local_est = int(rng.integers(1, 9))
        options = []
        for e in range(n):
            if rng.random() < 0.25:
                continue
            est = int(rng.integers(1, 9))
            if est <= local_est:
                options.append((est, e))
        options.sort()
        prefs.append(UnPreference(un_id=u, request=None,
                                  ranked_options=[e for _, e in options] + [LOCAL]))
    return FuzzInstance(n_uns=m, n_cloudlets=n, prefs=prefs, scores=scores)


def _position_table(inst: FuzzInstance) -> np.ndarray:
    """pos[u, option+1] = rank of option in u's list (LOCAL maps to index 0)."""
    m, n = inst.n_uns, inst.n_cloudlets
    pos = np.full((m, n + 1), 10**6, dtype=np.int64)
    for u, pref in enumerate(inst.prefs):
        for i, opt in enumerate(pref.ranked_options):
            pos[u, opt + 1] = i
    return pos


def enumerate_stable(inst: FuzzInstance) -> np.ndarray:
    """All stable matchings, one row per matching, entries in {-1} U cloudlets.

    A matching is stable when it is individually rational (every matched
    pair mutually acceptable) and admits no blocking pair under the same
    tie-broken orders deferred acceptance uses.
    """
    m, n = inst.n_uns, inst.n_cloudlets
    pos = _position_table(inst)
    feasible = [
        [LOCAL] + [e for e in pref.ranked_options[:-1] if not np.isnan(inst.scores[pref.un_id, e])]
        for pref in inst.prefs
    ]
    combos = np.array(list(itertools.product(*feasible)), dtype=np.int64)
    if combos.size == 0:
        combos = combos.reshape(0, m)
    valid = np.ones(len(combos), dtype=bool)
    for e in range(n):
        valid &= (combos == e).sum(axis=1) <= 1
    combos = combos[valid]

    scores = np.where(np.isnan(inst.scores), _NEG, inst.scores)
    stable = np.ones(len(combos), dtype=bool)
    assigned_pos = np.column_stack([pos[u, combos[:, u] + 1] for u in range(m)])
    for u in range(m):
        pref = inst.prefs[u]
        for e in pref.ranked_options[:-1]:
            if np.isnan(inst.scores[u, e]):
                continue  # cloudlet never accepts u; cannot block
            prefers_u = pos[u, e + 1] < assigned_pos[:, u]
            matched_mask = combos == e
            e_taken = matched_mask.any(axis=1)
            holder = matched_mask.argmax(axis=1)
            holder_score = scores[holder, e]
            e_prefers = np.where(
                e_taken,
                (scores[u, e] > holder_score)
                | ((scores[u, e] == holder_score) & (u < holder)),
                True)
            stable &= ~(prefers_u & e_prefers)
    return combos[stable]


def matching_vector(matching: Matching, n_uns: int) -> np.ndarray:
    return np.array([matching.pairs[u] for u in range(n_uns)], dtype=np.int64)


def check_instance(inst: FuzzInstance) -> dict:
    """Run DA on the instance and verify stability, membership in the
    enumerated stable set, and proposer-side optimality."""
    result = deferred_acceptance(inst.prefs, inst.score_fn)
    blocking = find_blocking_pairs(result, inst.prefs, inst.score_fn)
    stable_set = enumerate_stable(inst)
    vec = matching_vector(result, inst.n_uns)
    member = bool(len(stable_set)) and bool((stable_set == vec).all(axis=1).any())
    pos = _position_table(inst)
    da_pos = np.array([pos[u, vec[u] + 1] for u in range(inst.n_uns)])
    optimal = True
    for row in stable_set:
        row_pos = np.array([pos[u, row[u] + 1] for u in range(inst.n_uns)])
        if (da_pos > row_pos).any():
            optimal = False
            break
    return {
        "blocking_pairs": blocking,
        "in_stable_set": member,
        "proposer_optimal": optimal,
        "n_stable": int(len(stable_set)),
    }


def run_fuzz(n_instances: int, max_size: int, seed: int) -> dict:
    """Fuzz DA against the brute-force oracle; returns a failure report."""
    rng = np.random.default_rng(seed)
    failures = []
    for i in range(n_instances):
        inst = random_instance(rng, max_uns=max_size, max_cloudlets=max_size)
        report = check_instance(inst)
        if report["blocking_pairs"] or not report["in_stable_set"] or not report["proposer_optimal"]:
            failures.append((i, report))
    return {"instances": n_instances, "failures": failures}
