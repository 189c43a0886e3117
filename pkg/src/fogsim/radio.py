"""Radio layer: path loss, fading, interference, rates, coverage and the
time-averaged per-link rate estimate."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entities import Cloudlet, UserNode

# Log-distance path loss constants. The gentle exponent models a dense
# short-range deployment with near-line-of-sight links, where concurrent
# uplinks interfere strongly across cells.
PL0_DB = 38.5          # loss at the 1 m reference distance
PATHLOSS_EXPONENT = 2.0
REFERENCE_DISTANCE_M = 1.0


def path_loss(distance_m: float) -> float:
    """Log-distance path loss in dB; distances below 1 m are clamped."""
    d = max(float(distance_m), REFERENCE_DISTANCE_M)
    return PL0_DB + 10.0 * PATHLOSS_EXPONENT * math.log10(d / REFERENCE_DISTANCE_M)


def path_loss_matrix(un_positions: np.ndarray, cl_positions: np.ndarray) -> np.ndarray:
    """Vectorised path loss for every (UN, cloudlet) pair."""
    diff = un_positions[:, None, :] - cl_positions[None, :, :]
    d = np.maximum(np.sqrt((diff ** 2).sum(axis=2)), REFERENCE_DISTANCE_M)
    return PL0_DB + 10.0 * PATHLOSS_EXPONENT * np.log10(d / REFERENCE_DISTANCE_M)


def dbm_to_mw(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0)


def uplink_rate(p_tx_dbm: float, pathloss_db: float, fading: float,
                interference_mw: float, noise_mw: float, bw_hz: float) -> float:
    """Shannon uplink rate BW*log2(1 + S/(N+I)) in bits/s."""
    if bw_hz <= 0 or noise_mw <= 0:
        raise ValueError("bandwidth and noise must be positive")
    if interference_mw < 0 or fading < 0:
        raise ValueError("interference and fading must be non-negative")
    received_mw = dbm_to_mw(p_tx_dbm - pathloss_db) * fading
    sinr = received_mw / (noise_mw + interference_mw)
    return bw_hz * math.log2(1.0 + sinr)


def interference_at(cloudlet: Cloudlet, active_transmitters) -> float:
    """Total received power (mW) at a cloudlet from UNs transmitting to
    other cloudlets. `active_transmitters` yields (un, target_cloudlet_id,
    fading_gain) triples; the cloudlet's own transmitter is excluded."""
    total = 0.0
    for un, target_id, fading in active_transmitters:
        if target_id == cloudlet.id:
            continue
        d = float(np.linalg.norm(un.position - cloudlet.position))
        total += dbm_to_mw(un.tx_power_dbm - path_loss(d)) * fading
    return total


@dataclass(frozen=True)
class RateEstimate:
    """Time-averaged per-link service rate (bits/s)."""
    value_bps: float = 0.0
    update_count: int = 0


def update_rate_estimate(est: RateEstimate, observed_bps: float,
                         exponent: float = 0.55) -> RateEstimate:
    """Stochastic-approximation update with step nu(t) = 1/t^exponent.

    The first update (t=1) adopts the observation outright.
    """
    if observed_bps < 0:
        raise ValueError("observed rate must be non-negative")
    t = est.update_count + 1
    nu = t ** (-exponent)
    value = nu * observed_bps + (1.0 - nu) * est.value_bps
    return RateEstimate(value_bps=value, update_count=t)


@dataclass(frozen=True)
class LinkState:
    pathloss_db: float
    fading_gain: float
    in_coverage: bool


def coverage_set(un: UserNode, cloudlets, threshold_db: float) -> set[int]:
    """Cloudlets whose path loss to the UN does not exceed the coverage
    threshold. Independent of instantaneous fading by design."""
    out = set()
    for cl in cloudlets:
        d = float(np.linalg.norm(un.position - cl.position))
        if path_loss(d) <= threshold_db:
            out.add(cl.id)
    return out
