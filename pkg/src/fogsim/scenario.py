"""Scenario generation: entity placement, popularity profiles, arrivals."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import ConfigError, ScenarioConfig
from .entities import Cloudlet, Request, Task, UserNode
from .rng import RandomSource


@dataclass
class ZipfProfile:
    """Task popularity profile: request probability of the i-th most popular
    task proportional to 1/i^z, with `ranking[i]` the task id at rank i."""
    ranking: np.ndarray  # task id per popularity rank (rank 0 = most popular)
    z: float

    def __post_init__(self):
        n = len(self.ranking)
        weights = (np.arange(1, n + 1, dtype=float)) ** (-self.z)
        self.pmf = weights / weights.sum()
        self._cdf = np.cumsum(self.pmf)
        self._cdf[-1] = 1.0

    def sample(self, uniforms: np.ndarray) -> np.ndarray:
        """Map U(0,1) draws to task ids via the rank CDF."""
        ranks = np.searchsorted(self._cdf, uniforms, side="right")
        return self.ranking[ranks]

    def task_probability(self, task_id: int) -> float:
        rank = int(np.nonzero(self.ranking == task_id)[0][0])
        return float(self.pmf[rank])


def _grid_positions(n: int, side: float, rng: np.random.Generator) -> np.ndarray:
    """Near-square grid with uniform jitter of +/-10% of the cell size."""
    rows = max(1, int(math.floor(math.sqrt(n))))
    cols = int(math.ceil(n / rows))
    cell_w, cell_h = side / cols, side / rows
    pos = np.empty((n, 2))
    for i in range(n):
        r, c = divmod(i, cols)
        pos[i, 0] = (c + 0.5) * cell_w
        pos[i, 1] = (r + 0.5) * cell_h
    jitter = rng.uniform(-0.1, 0.1, size=(n, 2)) * np.array([cell_w, cell_h])
    return np.clip(pos + jitter, 0.0, side)


def generate_scenario(config: ScenarioConfig, rand: RandomSource):
    """Build (user nodes, cloudlets, tasks, profiles) from a validated config.

    UNs are uniform over the square area; cloudlets sit on a jittered grid;
    exactly round(cacheable_fraction * n_tasks) tasks are cacheable, chosen
    uniformly; each UN gets one of n_profiles Zipf permutations uniformly;
    per-UN arrival rates split the aggregate traffic evenly.
    """
    config.validate()

    n_cacheable = config.n_cacheable
    cacheable_ids = np.sort(
        rand.stream("cacheable_choice").choice(config.n_tasks, size=n_cacheable, replace=False)
    )
    cacheable = np.zeros(config.n_tasks, dtype=bool)
    cacheable[cacheable_ids] = True
    tasks = [
        Task(id=i, cacheable=bool(cacheable[i]),
             mean_size_bits=config.mean_task_size_bits, cycles_per_bit=1.0)
        for i in range(config.n_tasks)
    ]

    profiles = [
        ZipfProfile(ranking=rand.stream("profiles").permutation(config.n_tasks), z=config.zipf_z)
        for _ in range(config.n_profiles)
    ]

    placement = rand.stream("placement")
    un_pos = placement.uniform(0.0, config.area_side_m, size=(config.n_uns, 2))
    cl_pos = _grid_positions(config.n_cloudlets, config.area_side_m, placement)

    profile_ids = rand.stream("profile_assignment").integers(0, config.n_profiles, size=config.n_uns)
    lam = config.arrival_rate_per_un

    uns = [
        UserNode(id=u, position=un_pos[u], tx_power_dbm=config.tx_power_dbm,
                 local_rate_cycles_per_s=1.0 / config.kappa_over_clocal_s_per_bit,
                 arrival_rate_per_s=lam, popularity_profile_id=int(profile_ids[u]))
        for u in range(config.n_uns)
    ]
    cloudlets = [
        Cloudlet(id=e, position=cl_pos[e],
                 compute_rate_cycles_per_s=1.0 / config.kappa_over_ce_s_per_bit,
                 storage_slots=config.storage_slots)
        for e in range(config.n_cloudlets)
    ]
    return uns, cloudlets, tasks, profiles


def sample_arrivals(un: UserNode, slot: int, profile: ZipfProfile,
                    config: ScenarioConfig, rand: RandomSource) -> list[Request]:
    """Poisson arrivals for one UN in one slot; tasks follow the UN's Zipf
    profile and sizes are exponential with the configured mean."""
    if slot < 0:
        raise ValueError("slot must be >= 0")
    count = int(rand.stream("arrivals").poisson(un.arrival_rate_per_s * config.slot_duration_s))
    if count == 0:
        return []
    task_ids = profile.sample(rand.stream("task_choice").random(count))
    sizes = rand.stream("sizes").exponential(config.mean_task_size_bits, size=count)
    return [
        Request(task_id=int(t), un_id=un.id, size_bits=float(s), arrival_slot=slot)
        for t, s in zip(task_ids, sizes)
    ]
