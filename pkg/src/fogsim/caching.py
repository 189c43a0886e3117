"""Per-cloudlet proactive result cache with popularity-ordered replacement."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional


class AdmitOutcome(Enum):
    INSERTED = "inserted"
    REPLACED = "replaced"
    REJECTED = "rejected"
    DUPLICATE = "duplicate"


@dataclass(frozen=True)
class AdmitResult:
    outcome: AdmitOutcome
    victim: Optional[int] = None


@dataclass
class CacheStore:
    """Bounded store of computed-result task ids.

    Replacement follows the popularity ranking: a full cache admits a new
    result only by evicting a strictly less popular resident, and always
    evicts the least popular one. Consequently the store always holds the
    most popular min(capacity, seen) distinct cacheable tasks ever admitted.
    """
    capacity: int
    cacheable_ids: frozenset
    entries: set = field(default_factory=set)
    rank_of: dict = field(default_factory=dict)  # task id -> index in xi (0 = most popular)

    def lookup(self, task_id: int) -> bool:
        return task_id in self.entries

    def admit(self, task_id: int) -> AdmitResult:
        if task_id not in self.cacheable_ids:
            return AdmitResult(AdmitOutcome.REJECTED)
        if task_id in self.entries:
            return AdmitResult(AdmitOutcome.DUPLICATE)
        if task_id not in self.rank_of:
            raise KeyError(
                f"task {task_id} missing from popularity ranking; "
                "cache used before a popularity vector was bound"
            )
        if self.capacity <= 0:
            return AdmitResult(AdmitOutcome.REJECTED)
        if len(self.entries) < self.capacity:
            self.entries.add(task_id)
            return AdmitResult(AdmitOutcome.INSERTED)
        victim = max(self.entries, key=lambda t: self.rank_of[t])
        if self.rank_of[victim] > self.rank_of[task_id]:
            self.entries.discard(victim)
            self.entries.add(task_id)
            return AdmitResult(AdmitOutcome.REPLACED, victim=victim)
        return AdmitResult(AdmitOutcome.REJECTED)

    def rebind_popularity(self, xi) -> "CacheStore":
        """Replace the popularity ranking; cached entries are untouched."""
        if set(xi) != set(self.cacheable_ids) or len(xi) != len(self.cacheable_ids):
            raise ValueError("popularity vector must be a permutation of the cacheable task set")
        self.rank_of = {int(t): i for i, t in enumerate(xi)}
        return self
