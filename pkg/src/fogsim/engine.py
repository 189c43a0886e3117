"""Time-slotted simulation engine: training, arrivals, cache-hit service,
per-slot matching, queue drain and delay accounting."""
from __future__ import annotations

import csv
import heapq
import json
import math
import os
from collections import deque
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import clustering, matching as da
from .caching import CacheStore
from .config import ScenarioConfig
from .entities import Request, RequestState
from .matching import LOCAL, DelayParams, UnPreference
from .radio import path_loss_matrix
from .rng import RandomSource
from .scenario import generate_scenario

_INV_LN2 = 1.0 / math.log(2.0)
_NO_ARRIVAL = 1 << 62
_ARRIVAL_BLOCK = 8192


class EngineError(RuntimeError):
    pass


@dataclass(slots=True)
class CompletedRow:
    slot: int            # arrival slot of the request
    un: int
    task: int
    scheme: str
    served_by: str       # "local" | "cloudlet:<id>" | "cache:<id>"
    cacheable: int
    hit: int
    transmit_s: float
    compute_s: float
    queue_wait_s: float
    processing_s: float
    total_s: float


REQUEST_LOG_HEADER = ["slot", "un", "task", "scheme", "served_by", "cacheable",
                      "hit", "transmit_s", "compute_s", "queue_wait_s",
                      "processing_s", "total_s"]


def write_request_log(rows, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(REQUEST_LOG_HEADER)
        for r in rows:
            w.writerow([r.slot, r.un, r.task, r.scheme, r.served_by, r.cacheable,
                        r.hit, repr(r.transmit_s), repr(r.compute_s),
                        repr(r.queue_wait_s), repr(r.processing_s), repr(r.total_s)])


@dataclass
class RunResult:
    config: ScenarioConfig
    rows: list
    counters: dict
    assignment: Optional[clustering.ClusterAssignment] = None
    popularity: Optional[clustering.PopularityMatrix] = None


class Engine:
    """Owns one scenario and advances it slot by slot.

    Single-threaded over its own state; run several engines (distinct
    configs/seeds) in parallel processes for sweeps.
    """

    def __init__(self, config: ScenarioConfig, diagnostics_dir: str | None = None):
        config.validate()
        self.config = config
        self.diagnostics_dir = diagnostics_dir
        self.rand = RandomSource(config.seed)
        self.uns, self.cloudlets, self.tasks, self.profiles = generate_scenario(config, self.rand)

        cfg = config
        self.n_uns, self.n_cloudlets = cfg.n_uns, cfg.n_cloudlets
        self.scheme = cfg.scheme
        self.slot_dur = cfg.slot_duration_s
        self.bw = cfg.bandwidth_hz
        self.noise_mw = cfg.noise_mw
        self.kappa_ce = cfg.kappa_over_ce_s_per_bit
        self.kappa_clocal = cfg.kappa_over_clocal_s_per_bit
        self.budget_s = cfg.delay_budget_s
        self.tau_ep_lo, self.tau_ep_hi = cfg.tau_ep_range_s
        self.tau_lp_lo, self.tau_lp_hi = cfg.tau_lp_range_s
        self.est_exp = cfg.estimator_exponent
        self.params = DelayParams(
            kappa_over_ce_s_per_bit=self.kappa_ce,
            kappa_over_clocal_s_per_bit=self.kappa_clocal,
            tau_ep_mean_s=cfg.tau_ep_mean_s,
            tau_lp_mean_s=cfg.tau_lp_mean_s,
        )

        self.cacheable = np.array([t.cacheable for t in self.tasks], dtype=bool)
        self.cacheable_ids = np.flatnonzero(self.cacheable)
        cacheable_set = frozenset(int(i) for i in self.cacheable_ids)
        # column index of each task in the cacheable histogram, -1 otherwise
        self.cacheable_col = np.full(cfg.n_tasks, -1, dtype=int)
        self.cacheable_col[self.cacheable_ids] = np.arange(len(self.cacheable_ids))

        self.un_profile = np.array([u.popularity_profile_id for u in self.uns])
        un_xy = np.array([u.position for u in self.uns])
        cl_xy = np.array([c.position for c in self.cloudlets])

        # static radio geometry
        self.pl_db = path_loss_matrix(un_xy, cl_xy)
        self.gain_mw = 10.0 ** ((cfg.tx_power_dbm - self.pl_db) / 10.0)
        self.covered = self.pl_db <= cfg.coverage_pathloss_db
        cov_u, cov_e = np.nonzero(self.covered)
        self.cov_u, self.cov_e = cov_u, cov_e
        self.n_cov = len(cov_u)
        self.gain_flat = self.gain_mw[cov_u, cov_e]
        self.flat_idx = np.full((self.n_uns, self.n_cloudlets), -1, dtype=int)
        self.flat_idx[cov_u, cov_e] = np.arange(self.n_cov)
        self.covered_ids = [sorted(np.flatnonzero(self.covered[u]).tolist())
                            for u in range(self.n_uns)]

        masked_pl = np.where(self.covered, self.pl_db, np.inf)
        self.min_pl_cl = np.where(self.covered.any(axis=1), masked_pl.argmin(axis=1), -1)
        self.b2_order = [
            [int(e) for e in sorted(self.covered_ids[u], key=lambda e: (self.pl_db[u, e], e))]
            for u in range(self.n_uns)
        ]
        dist_eu = np.linalg.norm(cl_xy[:, None, :] - un_xy[None, :, :], axis=2)
        self.nearest_un = dist_eu.argmin(axis=1)

        # caching applies only to the proposed scheme
        self.use_cache = self.scheme == "proposed" and len(self.cacheable_ids) > 0
        self.caches = [CacheStore(capacity=cfg.storage_slots, cacheable_ids=cacheable_set)
                       for _ in range(self.n_cloudlets)]
        for cl, cache in zip(self.cloudlets, self.caches):
            cl.cache = cache

        # dynamic state
        self.t = 0
        self.rbar = np.zeros(self.n_cov)
        self.est_count = 0
        self.coherence = cfg.fading_coherence_slots
        self.fading = np.ones((self.n_uns, self.n_cloudlets))
        self._fading_until = 0  # slot (exclusive) the current fading block covers
        self._fading_cov = np.ones(self.n_cov)
        self._clean_rates = np.zeros(self.n_cov)
        self.cl_q: list[deque] = [deque() for _ in range(self.n_cloudlets)]
        self.local_q: list[deque] = [deque() for _ in range(self.n_uns)]
        self.pending: list[deque] = [deque() for _ in range(self.n_uns)]
        self.admissions: list = []  # heap of (time_s, cloudlet, task)
        self.rows: list[CompletedRow] = []
        self.generated = 0
        self.cache_hits = 0
        self.trained = False
        self.assignment: Optional[clustering.ClusterAssignment] = None
        self.popularity: Optional[clustering.PopularityMatrix] = None

        self._rng_arrivals = self.rand.stream("arrivals")
        self._rng_tasks = self.rand.stream("task_choice")
        self._rng_sizes = self.rand.stream("sizes")
        self._rng_fading = self.rand.stream("fading")
        self._rng_processing = self.rand.stream("processing")
        self._arr_map: dict[int, list] = {}
        self._arr_slots: list[int] = []
        self._arr_cursor = 0
        self._arr_drawn_until = 0

    # -- randomness hooks (monkeypatch points for deterministic tests) -----

    def _draw_fading(self, size) -> np.ndarray:
        return self._rng_fading.exponential(1.0, size=size)

    def _ensure_fading(self, slot: int) -> None:
        """Redraw the per-link Rayleigh power gains at coherence-block
        boundaries; links keep their gain for fading_coherence_slots."""
        if slot < self._fading_until:
            return
        self.fading = self._draw_fading((self.n_uns, self.n_cloudlets))
        self._fading_until = (slot // self.coherence + 1) * self.coherence
        self._fading_cov = self.fading[self.cov_u, self.cov_e]
        self._clean_rates = self.bw * _INV_LN2 * np.log1p(
            self.gain_flat * self._fading_cov / self.noise_mw)

    def _draw_tau_ep(self) -> float:
        return float(self._rng_processing.uniform(self.tau_ep_lo, self.tau_ep_hi))

    def _draw_tau_lp(self) -> float:
        return float(self._rng_processing.uniform(self.tau_lp_lo, self.tau_lp_hi))

    # -- arrivals -----------------------------------------------------------

    def _extend_arrivals(self) -> None:
        """Pre-draw one block of Poisson arrivals (counts, tasks, sizes)."""
        lam = self.config.arrival_rate_per_un * self.slot_dur
        base = self._arr_drawn_until
        counts = self._rng_arrivals.poisson(lam, size=(_ARRIVAL_BLOCK, self.n_uns))
        nz = np.argwhere(counts > 0)
        total = int(counts[counts > 0].sum())
        if total:
            uniforms = self._rng_tasks.random(total)
            sizes = self._rng_sizes.exponential(self.config.mean_task_size_bits, size=total)
            task_ids = np.empty(total, dtype=int)
            # map uniforms through each UN's Zipf profile, in (slot, un) order
            reps = counts[nz[:, 0], nz[:, 1]]
            owner_un = np.repeat(nz[:, 1], reps)
            owner_slot = np.repeat(nz[:, 0], reps)
            for p, profile in enumerate(self.profiles):
                mask = self.un_profile[owner_un] == p
                if mask.any():
                    task_ids[mask] = profile.sample(uniforms[mask])
            for s, u, task, size in zip(owner_slot.tolist(), owner_un.tolist(),
                                        task_ids.tolist(), sizes.tolist()):
                self._arr_map.setdefault(base + s, []).append((u, task, size))
        new_slots = sorted(s for s in self._arr_map if s >= base)
        self._arr_slots.extend(new_slots)
        self._arr_drawn_until = base + _ARRIVAL_BLOCK

    def _next_arrival_slot(self, slot: int) -> int:
        while True:
            while self._arr_cursor < len(self._arr_slots):
                s = self._arr_slots[self._arr_cursor]
                if s >= slot:
                    return s
                self._arr_cursor += 1
            if self._arr_drawn_until > self.config.n_slots:
                return _NO_ARRIVAL
            self._extend_arrivals()

    def _arrivals_for_slot(self, slot: int) -> list:
        while self._arr_drawn_until <= slot:
            self._extend_arrivals()
        return self._arr_map.pop(slot, [])

    # -- training -----------------------------------------------------------

    def run_training(self) -> None:
        """Collect request histograms, serving counts and warm rate estimates
        over the training window, then cluster and distribute popularity
        orderings (proposed scheme only). Caches stay empty."""
        self.trained = True
        if self.scheme == "baseline2" or self.config.n_training_slots < 1:
            return
        cfg = self.config
        n_cacheable = len(self.cacheable_ids)
        hist = np.zeros((self.n_uns, n_cacheable))
        svc = np.zeros((self.n_cloudlets, self.n_uns))
        rng_train = self.rand.stream("training")
        served_mask = self.min_pl_cl >= 0
        served_uns = np.flatnonzero(served_mask)
        serving_cl = self.min_pl_cl[served_mask]
        all_uns = np.arange(self.n_uns)

        for _ in range(cfg.n_training_slots):
            draws = rng_train.random(self.n_uns)
            task_ids = np.empty(self.n_uns, dtype=int)
            for p, profile in enumerate(self.profiles):
                mask = self.un_profile == p
                if mask.any():
                    task_ids[mask] = profile.sample(draws[mask])
            cols = self.cacheable_col[task_ids]
            has_col = cols >= 0
            np.add.at(hist, (all_uns[has_col], cols[has_col]), 1.0)
            np.add.at(svc, (serving_cl, served_uns), 1.0)
            # rate estimate warm-up: one interference-free observation per link
            f = self._draw_fading(self.n_cov)
            rates = self.bw * _INV_LN2 * np.log1p(self.gain_flat * f / self.noise_mw)
            self.est_count += 1
            nu = self.est_count ** (-self.est_exp)
            self.rbar *= 1.0 - nu
            self.rbar += nu * rates

        if not self.use_cache:
            return
        if hist.sum() == 0:
            raise EngineError("training window produced no cacheable requests; "
                              "popularity clustering is undefined")
        s_d = clustering.distance_similarity_matrix(
            np.array([u.position for u in self.uns]), cfg.sigma_d_sq)
        s_p = clustering.popularity_similarity_matrix(hist)
        s = clustering.blend_similarity(s_d, s_p, cfg.theta)
        self.assignment = clustering.spectral_cluster(
            s, cfg.k_min, cfg.resolved_k_max, self.rand.stream("kmeans"))
        self.popularity = clustering.build_popularity_matrix(
            self.assignment, hist, self.cacheable_ids)
        preferred = clustering.assign_preferred_clusters(
            svc, self.assignment, self.nearest_un)
        for e, cl in enumerate(self.cloudlets):
            xi = self.popularity.per_cluster[preferred[e]]
            cl.preferred_cluster = int(preferred[e])
            cl.popularity_vector = [int(t) for t in xi]
            self.caches[e].rebind_popularity(xi)
        if self.diagnostics_dir:
            self._dump_clustering_diagnostics(s, hist)

    def _dump_clustering_diagnostics(self, s: np.ndarray, hist: np.ndarray) -> None:
        os.makedirs(self.diagnostics_dir, exist_ok=True)
        np.savetxt(os.path.join(self.diagnostics_dir, "similarity.csv"), s, delimiter=",")
        lap = clustering.normalized_laplacian(s)
        eigvals = np.linalg.eigvalsh(0.5 * (lap + lap.T))
        np.savetxt(os.path.join(self.diagnostics_dir, "eigenvalues.csv"), eigvals, delimiter=",")
        np.savetxt(os.path.join(self.diagnostics_dir, "labels.csv"),
                   self.assignment.labels, fmt="%d", delimiter=",")
        with open(os.path.join(self.diagnostics_dir, "popularity.csv"), "w",
                  newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            for c, xi in enumerate(self.popularity.per_cluster):
                w.writerow([c] + [int(t) for t in xi])

    # -- per-slot machinery ---------------------------------------------------

    def _quiet(self) -> bool:
        return (not self.admissions
                and all(not q for q in self.pending)
                and all(not q for q in self.cl_q)
                and all(not q for q in self.local_q))

    def _advance_quiet(self, n_slots: int) -> None:
        """Fast-forward slots with no queue or request activity: only the
        per-link rate estimates evolve (interference-free observations).
        Within one fading block the observed rates are constant, so the
        m-slot estimator recursion folds to a single convex combination."""
        end = self.t + n_slots
        while self.t < end:
            self._ensure_fading(self.t)
            seg_end = min(end, self._fading_until)
            m = seg_end - self.t
            t0 = self.est_count
            om = 1.0 - (np.arange(t0 + 1, t0 + m + 1, dtype=float)) ** (-self.est_exp)
            keep = float(np.prod(om))
            self.rbar *= keep
            self.rbar += (1.0 - keep) * self._clean_rates
            self.est_count += m
            self.t = seg_end

    def _active_transmitters(self) -> list:
        """(un, cloudlet) pairs transmitting this slot. A UN has one radio:
        if it owns the head of several cloudlet queues, only the
        lowest-id cloudlet's head transmits; the others stall."""
        actives = []
        busy_uns = set()
        for e, q in enumerate(self.cl_q):
            if q and q[0].un_id not in busy_uns:
                busy_uns.add(q[0].un_id)
                actives.append((q[0].un_id, e))
        return actives

    def _instantaneous_rates(self, actives: list) -> np.ndarray:
        """Current-slot rates per covered pair: this fading block's gains
        plus interference from the currently transmitting queue heads."""
        self._ensure_fading(self.t)
        if not actives:
            return self._clean_rates
        interference = np.zeros(self.n_cloudlets)
        for u, target in actives:
            contrib = self.gain_mw[u] * self.fading[u]
            interference += contrib
            interference[target] -= contrib[target]
        sinr = self.gain_flat * self._fading_cov / (self.noise_mw + interference[self.cov_e])
        return self.bw * _INV_LN2 * np.log1p(sinr)

    def _local_wait_s(self, u: int) -> float:
        return sum(r.remaining_compute_s for r in self.local_q[u])

    def _queue_backlog_s(self, e: int) -> float:
        total = 0.0
        for r in self.cl_q[e]:
            total += r.remaining_bits / self.rbar[self.flat_idx[r.un_id, e]]
        return total

    def _trace_matching(self, events: list, matching: da.Matching) -> None:
        path = os.path.join(self.diagnostics_dir, "matching_trace.jsonl")
        os.makedirs(self.diagnostics_dir, exist_ok=True)
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps({"slot": self.t, "events": events,
                                 "pairs": matching.pairs}) + "\n")

    def assign_new_requests(self, requests: list) -> da.Matching:
        """Scheme-dependent matching of this slot's head requests."""
        trace: list | None = [] if self.diagnostics_dir else None
        if self.scheme in ("proposed", "baseline1"):
            backlog: dict[int, float] = {}
            req_of = {r.un_id: r for r in requests}

            def phi(u: int, e: int) -> Optional[float]:
                req = req_of[u]
                if e not in backlog:
                    backlog[e] = self._queue_backlog_s(e)
                rbar = self.rbar[self.flat_idx[u, e]]
                if rbar <= 0:
                    return None
                value = da.cloudlet_utility(
                    req.size_bits, rbar, backlog[e], self.budget_s,
                    self.kappa_ce, self.params.tau_ep_mean_s)
                return value if value >= 0 else None

            prefs = []
            for r in requests:
                u = r.un_id
                covered = [e for e in self.covered_ids[u] if self.rbar[self.flat_idx[u, e]] > 0]
                prefs.append(da.build_un_preferences(
                    r, covered,
                    cached_at=lambda e, task=r.task_id: (self.use_cache
                                                         and self.caches[e].lookup(task)),
                    rbar_of=lambda e, u=u: float(self.rbar[self.flat_idx[u, e]]),
                    local_wait_s=self._local_wait_s(u),
                    params=self.params))
            result = da.deferred_acceptance(prefs, phi, trace=trace)
            if trace is not None:
                self._trace_matching(trace, result)
            return result

        # baseline2: rank purely by static link quality, every proposer acceptable
        def link_quality(u: int, e: int) -> float:
            return -float(self.pl_db[u, e])

        prefs = [UnPreference(un_id=r.un_id, request=r,
                              ranked_options=self.b2_order[r.un_id] + [LOCAL])
                 for r in requests]
        result = da.deferred_acceptance(prefs, link_quality, trace=trace)
        if trace is not None:
            self._trace_matching(trace, result)
        return result

    def step(self) -> None:
        """Advance one slot: rates, admissions, arrivals, cache hits,
        matching, queue service, local service, estimator update."""
        if not self.trained:
            raise EngineError("run_training() must run before stepping")
        cfg = self.config
        slot_start = self.t * self.slot_dur

        actives = self._active_transmitters()
        rates = self._instantaneous_rates(actives)
        transmitting = {u for u, _ in actives}

        while self.admissions and self.admissions[0][0] <= slot_start:
            _, e, task = heapq.heappop(self.admissions)
            self.caches[e].admit(task)

        for u, task, size in self._arrivals_for_slot(self.t):
            self.pending[u].append(Request(task_id=task, un_id=u, size_bits=size,
                                           arrival_slot=self.t))
            self.generated += 1

        if self.use_cache:
            for u in range(self.n_uns):
                q = self.pending[u]
                if not q:
                    continue
                kept = deque()
                for req in q:
                    hit_at = -1
                    if self.cacheable[req.task_id]:
                        for e in self.covered_ids[u]:
                            if self.caches[e].lookup(req.task_id):
                                hit_at = e
                                break
                    if hit_at < 0:
                        kept.append(req)
                        continue
                    tau = self._draw_tau_ep()
                    req.state = RequestState.CACHE_SERVED
                    req.served_by = f"cache:{hit_at}"
                    req.completion_slot = self.t
                    self.cache_hits += 1
                    self.rows.append(CompletedRow(
                        slot=req.arrival_slot, un=u, task=req.task_id,
                        scheme=self.scheme, served_by=req.served_by,
                        cacheable=1, hit=1, transmit_s=0.0, compute_s=0.0,
                        queue_wait_s=0.0, processing_s=tau, total_s=tau))
                self.pending[u] = kept

        heads = [self.pending[u][0] for u in range(self.n_uns) if self.pending[u]]
        if heads:
            result = self.assign_new_requests(heads)
            for req in heads:
                u = req.un_id
                option = result.pairs[u]
                self.pending[u].popleft()
                if option == LOCAL:
                    req.state = RequestState.LOCAL_QUEUED
                    req.remaining_compute_s = self.kappa_clocal * req.size_bits
                    self.local_q[u].append(req)
                else:
                    req.state = RequestState.OFFLOAD_QUEUED
                    self.cl_q[option].append(req)

        self._serve_cloudlet_queues(rates, slot_start, actives)
        self._serve_local_queues(slot_start)

        self.est_count += 1
        nu = self.est_count ** (-self.est_exp)
        self.rbar *= 1.0 - nu
        self.rbar += nu * rates
        self.t += 1

    def _serve_cloudlet_queues(self, rates: np.ndarray, slot_start: float,
                               actives: list) -> None:
        engaged = {u: e for u, e in actives}
        for e in range(self.n_cloudlets):
            q = self.cl_q[e]
            if not q:
                continue
            time_left = self.slot_dur
            now = slot_start
            while time_left > 0 and q:
                head = q[0]
                if engaged.setdefault(head.un_id, e) != e:
                    break  # owner's radio is serving another cloudlet this slot
                if head.service_start_s is None:
                    head.service_start_s = now
                rate = float(rates[self.flat_idx[head.un_id, e]])
                if rate <= 0.0:
                    break
                need = head.remaining_bits / rate
                if need > time_left:
                    head.remaining_bits -= rate * time_left
                    time_left = 0.0
                    break
                now += need
                time_left -= need
                head.remaining_bits = 0.0
                q.popleft()
                arrival_time = head.arrival_slot * self.slot_dur
                compute = self.kappa_ce * head.size_bits
                tau = self._draw_tau_ep()
                queue_wait = head.service_start_s - arrival_time
                transmit = now - head.service_start_s
                total = queue_wait + transmit + compute + tau
                head.state = RequestState.DONE
                head.served_by = f"cloudlet:{e}"
                head.completion_slot = int((arrival_time + total) / self.slot_dur)
                self.rows.append(CompletedRow(
                    slot=head.arrival_slot, un=head.un_id, task=head.task_id,
                    scheme=self.scheme, served_by=head.served_by,
                    cacheable=int(self.cacheable[head.task_id]), hit=0,
                    transmit_s=transmit, compute_s=compute,
                    queue_wait_s=queue_wait, processing_s=tau, total_s=total))
                if self.use_cache and self.cacheable[head.task_id]:
                    heapq.heappush(self.admissions, (now + compute, e, head.task_id))

    def _serve_local_queues(self, slot_start: float) -> None:
        for u in range(self.n_uns):
            q = self.local_q[u]
            if not q:
                continue
            time_left = self.slot_dur
            now = slot_start
            while time_left > 0 and q:
                head = q[0]
                if head.service_start_s is None:
                    head.service_start_s = now
                if head.remaining_compute_s > time_left:
                    head.remaining_compute_s -= time_left
                    time_left = 0.0
                    break
                now += head.remaining_compute_s
                time_left -= head.remaining_compute_s
                head.remaining_compute_s = 0.0
                q.popleft()
                arrival_time = head.arrival_slot * self.slot_dur
                compute = self.kappa_clocal * head.size_bits
                tau = self._draw_tau_lp()
                queue_wait = head.service_start_s - arrival_time
                total = queue_wait + compute + tau
                head.state = RequestState.DONE
                head.served_by = "local"
                head.completion_slot = int((arrival_time + total) / self.slot_dur)
                self.rows.append(CompletedRow(
                    slot=head.arrival_slot, un=u, task=head.task_id,
                    scheme=self.scheme, served_by="local",
                    cacheable=int(self.cacheable[head.task_id]), hit=0,
                    transmit_s=0.0, compute_s=compute,
                    queue_wait_s=queue_wait, processing_s=tau, total_s=total))

    # -- top level ------------------------------------------------------------

    def run(self) -> RunResult:
        cfg = self.config
        self.run_training()
        while self.t < cfg.n_slots:
            if self._quiet():
                nxt = min(self._next_arrival_slot(self.t), cfg.n_slots)
                if nxt > self.t:
                    self._advance_quiet(nxt - self.t)
                    continue
            self.step()
        # sync estimate snapshots back onto the entities
        for e, cl in enumerate(self.cloudlets):
            lo_hi = np.flatnonzero(self.cov_e == e)
            cl.rate_estimates = {int(self.cov_u[i]): float(self.rbar[i]) for i in lo_hi}
        counters = {
            "generated": self.generated,
            "completed": len(self.rows),
            "cache_served": self.cache_hits,
            "cloudlet_served": sum(1 for r in self.rows if r.served_by.startswith("cloudlet")),
            "local_served": sum(1 for r in self.rows if r.served_by == "local"),
            "in_flight": self.generated - len(self.rows),
        }
        if counters["in_flight"] < 0:
            raise EngineError("conservation violated: more completions than arrivals")
        return RunResult(config=cfg, rows=self.rows, counters=counters,
                         assignment=self.assignment, popularity=self.popularity)


def run(config: ScenarioConfig, diagnostics_dir: str | None = None) -> RunResult:
    """Train and run one full scenario."""
    return Engine(config, diagnostics_dir=diagnostics_dir).run()
