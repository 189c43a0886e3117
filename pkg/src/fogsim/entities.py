"""Domain entities: tasks, user nodes, cloudlets and requests."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Deque, Optional

import numpy as np


@dataclass(frozen=True)
class Task:
    id: int
    cacheable: bool
    mean_size_bits: float
    cycles_per_bit: float

    def __post_init__(self):
        if self.mean_size_bits <= 0:
            raise ValueError("mean_size_bits must be positive")
        if self.cycles_per_bit <= 0:
            raise ValueError("cycles_per_bit must be positive")


class RequestState(Enum):
    PENDING = "pending"
    LOCAL_QUEUED = "local-queued"
    OFFLOAD_QUEUED = "offload-queued"
    CACHE_SERVED = "cache-served"
    DONE = "done"


@dataclass
class Request:
    """One arrival instance of a task at a user node.

    ``served_by`` is a display string: "local", "cloudlet:<id>" or
    "cache:<id>".
    """
    task_id: int
    un_id: int
    size_bits: float
    arrival_slot: int
    remaining_bits: float = 0.0
    state: RequestState = RequestState.PENDING
    completion_slot: Optional[int] = None
    served_by: Optional[str] = None
    # engine bookkeeping (continuous seconds); service start is transmit
    # start for offloaded requests and compute start for local ones
    service_start_s: Optional[float] = None
    remaining_compute_s: float = 0.0

    def __post_init__(self):
        if self.size_bits <= 0:
            raise ValueError("size_bits must be positive")
        if self.remaining_bits == 0.0 and self.state is RequestState.PENDING:
            self.remaining_bits = self.size_bits


@dataclass
class UserNode:
    id: int
    position: np.ndarray
    tx_power_dbm: float
    local_rate_cycles_per_s: float
    arrival_rate_per_s: float
    popularity_profile_id: int
    local_queue: Deque[Request] = field(default_factory=deque)


@dataclass
class Cloudlet:
    id: int
    position: np.ndarray
    compute_rate_cycles_per_s: float
    storage_slots: int
    offload_queue: Deque[Request] = field(default_factory=deque)
    cache: object = None  # CacheStore, attached by the engine
    rate_estimates: dict = field(default_factory=dict)
    preferred_cluster: Optional[int] = None
    popularity_vector: Optional[list] = None
