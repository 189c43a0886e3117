import math

import numpy as np
import pytest

from fogsim import radio
from fogsim.entities import Cloudlet, UserNode
from fogsim.radio import (RateEstimate, coverage_set, interference_at, path_loss,
                          path_loss_matrix, update_rate_estimate, uplink_rate)


def _un(x, y, uid=0, power=20.0):
    return UserNode(id=uid, position=np.array([x, y], dtype=float), tx_power_dbm=power,
                    local_rate_cycles_per_s=1e7, arrival_rate_per_s=1.0,
                    popularity_profile_id=0)


def _cl(x, y, cid=0):
    return Cloudlet(id=cid, position=np.array([x, y], dtype=float),
                    compute_rate_cycles_per_s=1e8, storage_slots=10)


def test_path_loss_reference_distance():
    assert path_loss(1.0) == pytest.approx(38.5)


def test_path_loss_clamps_below_reference():
    assert path_loss(0.01) == pytest.approx(38.5)


def test_path_loss_direct_value():
    # PL0 + 10*n*log10(d): 38.5 + 20*log10(10) = 58.5 with the n=2 exponent
    assert path_loss(10.0) == pytest.approx(38.5 + 10 * radio.PATHLOSS_EXPONENT)


def test_path_loss_monotone():
    ds = [1, 2, 5, 20, 100, 400]
    values = [path_loss(d) for d in ds]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_path_loss_matrix_matches_scalar():
    uns = np.array([[0.0, 0.0], [30.0, 40.0]])
    cls = np.array([[0.0, 0.0], [300.0, 0.0]])
    m = path_loss_matrix(uns, cls)
    for i, u in enumerate(uns):
        for j, c in enumerate(cls):
            assert m[i, j] == pytest.approx(path_loss(float(np.linalg.norm(u - c))))


def test_uplink_rate_zero_fading():
    assert uplink_rate(20.0, 70.0, 0.0, 0.0, 1e-11, 1e7) == 0.0


def test_uplink_rate_unity_sinr():
    # SINR exactly 1 -> rate = BW
    noise = 10 ** ((20.0 - 70.0) / 10.0)
    assert uplink_rate(20.0, 70.0, 1.0, 0.0, noise, 1e7) == pytest.approx(1e7)


def test_uplink_rate_direct_value():
    # 20 dBm through 73.5 dB over -104 dBm noise, 10 MHz: SINR = 10^5.05
    rate = uplink_rate(20.0, 73.5, 1.0, 0.0, 10 ** (-10.4), 1e7)
    assert rate == pytest.approx(167757497.37, rel=1e-6)


def test_uplink_rate_monotonicity():
    noise = 1e-11
    base = uplink_rate(20.0, 80.0, 1.0, 1e-9, noise, 1e7)
    assert uplink_rate(23.0, 80.0, 1.0, 1e-9, noise, 1e7) > base
    assert uplink_rate(20.0, 80.0, 1.0, 1e-9, noise, 2e7) > base
    assert uplink_rate(20.0, 80.0, 1.0, 5e-9, noise, 1e7) < base


def test_uplink_rate_rejects_bad_args():
    with pytest.raises(ValueError):
        uplink_rate(20.0, 80.0, 1.0, 0.0, 0.0, 1e7)
    with pytest.raises(ValueError):
        uplink_rate(20.0, 80.0, -1.0, 0.0, 1e-11, 1e7)


def test_interference_empty():
    assert interference_at(_cl(0, 0), []) == 0.0


def test_interference_single_and_linearity():
    # one interferer whose path loss works out to 73.5 dB
    d = 10 ** ((73.5 - 38.5) / (10 * radio.PATHLOSS_EXPONENT))
    cl = _cl(0.0, 0.0)
    un = _un(d, 0.0, uid=1)
    one = interference_at(cl, [(un, 5, 1.0)])
    assert one == pytest.approx(4.466835921509635e-06, rel=1e-9)
    two = interference_at(cl, [(un, 5, 1.0), (un, 7, 1.0)])
    assert two == pytest.approx(2 * one)


def test_interference_excludes_own_transmitter():
    cl = _cl(0.0, 0.0, cid=3)
    un = _un(50.0, 0.0)
    assert interference_at(cl, [(un, 3, 1.0)]) == 0.0


def test_estimate_first_update_adopts_observation():
    est = update_rate_estimate(RateEstimate(), 5e6)
    assert est.value_bps == pytest.approx(5e6)
    assert est.update_count == 1


def test_estimate_fixed_point():
    est = RateEstimate()
    for _ in range(50):
        est = update_rate_estimate(est, 3e6)
    assert est.value_bps == pytest.approx(3e6)


def test_estimate_direct_value():
    # old=2e6, observed=4e6, t=2: nu = 2^-0.55, new = 3.366e6
    est = RateEstimate(value_bps=2e6, update_count=1)
    est = update_rate_estimate(est, 4e6)
    assert est.value_bps == pytest.approx(3366040.2567543956, rel=1e-12)
    assert est.update_count == 2


def test_estimate_convergence_bounded_input():
    # nu(t) = t^-0.55: relative error below 1% after 1e4 updates on bounded input
    rng = np.random.default_rng(5)
    mu = 2e7
    est = RateEstimate()
    for x in rng.uniform(0.95 * mu, 1.05 * mu, size=10_000):
        est = update_rate_estimate(est, float(x))
    assert abs(est.value_bps - mu) / mu < 0.01


def test_coverage_thresholds():
    cls = [_cl(0, 0, 0), _cl(100, 0, 1), _cl(400, 0, 2)]
    un = _un(0.0, 0.0)
    assert coverage_set(un, cls, math.inf) == {0, 1, 2}
    assert coverage_set(un, cls, -math.inf) == set()


def test_coverage_radius_inversion():
    # threshold 83.5 dB inverts to 10^((83.5-38.5)/20) = 177.83 m at n=2
    radius = 10 ** ((83.5 - 38.5) / (10 * radio.PATHLOSS_EXPONENT))
    assert radius == pytest.approx(177.82794100389228)
    cls = [_cl(0, 0, 0)]
    assert coverage_set(_un(radius - 0.5, 0.0), cls, 83.5) == {0}
    assert coverage_set(_un(radius + 0.5, 0.0), cls, 83.5) == set()


def test_coverage_ignores_fading():
    # the same instance always produces the same set; no random state involved
    cls = [_cl(0, 0, 0), _cl(150, 0, 1)]
    un = _un(30.0, 0.0)
    assert coverage_set(un, cls, 83.5) == coverage_set(un, cls, 83.5)
