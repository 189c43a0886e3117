"""Per-slot preference construction, deferred acceptance and stability checks.

User nodes rank serving options by estimated delay and propose; cloudlets
hold the proposal with the largest reliability slack and reject the rest.
`LOCAL` is the outside option every UN falls back to.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .entities import Request

LOCAL = -1

# score_fn(un_id, cloudlet_id) -> float | None. None marks an unacceptable
# proposer; higher scores are preferred; ties break toward the lower UN id.
ScoreFn = Callable[[int, int], Optional[float]]


@dataclass
class DelayParams:
    """Scalars shared by every UN-side delay estimate."""
    kappa_over_ce_s_per_bit: float
    kappa_over_clocal_s_per_bit: float
    tau_ep_mean_s: float
    tau_lp_mean_s: float


@dataclass
class UnPreference:
    """A UN's ranked serving options for one request.

    `ranked_options` lists cloudlet ids in ascending estimated delay and
    always ends with LOCAL; cloudlets estimated slower than local computing
    are pruned. `estimates` keeps the delay estimate per listed option.
    """
    un_id: int
    request: Optional[Request]
    ranked_options: list = field(default_factory=list)
    estimates: dict = field(default_factory=dict)

    def position(self, option: int) -> int:
        try:
            return self.ranked_options.index(option)
        except ValueError:
            return len(self.ranked_options)


def build_un_preferences(request: Request, covered: list, cached_at: Callable[[int], bool],
                         rbar_of: Callable[[int], float], local_wait_s: float,
                         params: DelayParams) -> UnPreference:
    """Rank covering cloudlets and local compute by the UN's delay estimate.

    The UN knows its own queue but not the cloudlets'; a cloudlet holding
    the cached result costs only the processing delay. Ties break toward
    the lower cloudlet id; cloudlets estimated strictly worse than local
    are dropped.
    """
    size = request.size_bits
    local_est = (params.kappa_over_clocal_s_per_bit * size + local_wait_s
                 + params.tau_lp_mean_s)
    options = []
    for e in sorted(covered):
        if cached_at(e):
            est = params.tau_ep_mean_s
        else:
            est = (params.kappa_over_ce_s_per_bit * size + size / rbar_of(e)
                   + params.tau_ep_mean_s)
        if est <= local_est:
            options.append((est, e))
    options.sort(key=lambda p: (p[0], p[1]))
    pref = UnPreference(un_id=request.un_id, request=request,
                        ranked_options=[e for _, e in options] + [LOCAL])
    pref.estimates = {e: est for est, e in options}
    pref.estimates[LOCAL] = local_est
    return pref


def cloudlet_utility(size_bits: float, rbar_ue_bps: float, queue_backlog_s: float,
                     budget_s: float, kappa_over_ce_s_per_bit: float,
                     tau_ep_s: float) -> float:
    """Reliability slack left if this request were admitted now: budget
    minus compute, current transmission backlog, processing and the
    request's own estimated transmission time. Negative means admission
    would break the mean-delay budget."""
    return (budget_s
            - kappa_over_ce_s_per_bit * size_bits
            - queue_backlog_s
            - tau_ep_s
            - size_bits / rbar_ue_bps)


@dataclass
class Matching:
    """One-to-one assignment of proposing UNs to cloudlets or LOCAL."""
    pairs: dict = field(default_factory=dict)    # un id -> cloudlet id | LOCAL
    reverse: dict = field(default_factory=dict)  # cloudlet id -> un id

    def option_of(self, un_id: int) -> int:
        return self.pairs[un_id]


def deferred_acceptance(preferences: list, score_fn: ScoreFn,
                        trace: Optional[list] = None) -> Matching:
    """UN-proposing deferred acceptance.

    Unmatched UNs propose down their lists; a cloudlet holds its best
    acceptable proposer and rejects the rest; rejected UNs strike that
    cloudlet and continue; a UN whose list is exhausted computes locally.
    Terminates after at most (#UNs x #cloudlets) proposals. When `trace`
    is given, (event, un, cloudlet) records are appended to it.
    """
    prefs = {p.un_id: p for p in preferences}
    next_idx = {p.un_id: 0 for p in preferences}
    held: dict[int, tuple[float, int]] = {}  # cloudlet -> (score, un)
    result = Matching()
    free = sorted(prefs)

    def log(event: str, u: int, e: int) -> None:
        if trace is not None:
            trace.append((event, u, e))

    while free:
        u = free.pop(0)
        pref = prefs[u]
        while True:
            option = pref.ranked_options[next_idx[u]]
            if option == LOCAL:
                result.pairs[u] = LOCAL
                log("local", u, LOCAL)
                break
            next_idx[u] += 1
            log("propose", u, option)
            s = score_fn(u, option)
            if s is None:
                log("reject", u, option)
                continue
            if option not in held:
                held[option] = (s, u)
                log("hold", u, option)
                break
            s_held, u_held = held[option]
            if s > s_held or (s == s_held and u < u_held):
                held[option] = (s, u)
                log("hold", u, option)
                log("displace", u_held, option)
                free.append(u_held)
                free.sort()
                break
            log("reject", u, option)
            # rejected: strike this cloudlet and keep proposing

    for e, (_, u) in held.items():
        result.pairs[u] = e
        result.reverse[e] = u
    return result


def find_blocking_pairs(matching: Matching, preferences: list, score_fn: ScoreFn) -> list:
    """All (un, cloudlet) pairs that would both rather be together.

    A pair blocks when the UN ranks the cloudlet strictly above its current
    assignment and the cloudlet either holds nobody (and finds the UN
    acceptable) or strictly prefers the UN to its current partner
    (higher score, lower UN id on ties).
    """
    blocking = []
    for pref in preferences:
        u = pref.un_id
        assigned_pos = pref.position(matching.pairs[u])
        for pos, e in enumerate(pref.ranked_options):
            if e == LOCAL or pos >= assigned_pos:
                continue
            s = score_fn(u, e)
            if s is None:
                continue
            holder = matching.reverse.get(e)
            if holder is None:
                blocking.append((u, e))
                continue
            s_holder = score_fn(holder, e)
            if s_holder is None or s > s_holder or (s == s_holder and u < holder):
                blocking.append((u, e))
    return blocking
