import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ofdmaloss.model import (OUTAGE, CellGeometry, RadioParams, Scenario, Shadowing,
                             TrafficParams, classify_attenuated, compute_thresholds,
                             demand_deterministic, demand_shadowed, effective_n_max,
                             n_max_from_beta_min)

SEC3 = RadioParams(gamma=2.8, c0=2e5, w=2.5e5, p_ratio=1e6, mean_gain=1 / 12)
SEC4 = RadioParams(gamma=2.8, c0=2e5, w=2.5e5, p_ratio=1e6, beta_min=0.2)


def raw_demand(sir, load=0.8):
    """Direct Shannon ceiling, the formula evaluated without class machinery."""
    return max(1, math.ceil(load / math.log2(1 + sir)))


def test_deterministic_examples():
    assert demand_deterministic(100.0, SEC3) == 3
    assert demand_deterministic(0.0, SEC3) == 1
    assert demand_deterministic(63.0, SEC3) == 1
    assert demand_deterministic(64.5, SEC3) == 2


def test_deterministic_rejects_negative():
    with pytest.raises(ValueError):
        demand_deterministic(-1.0, SEC3)


def test_deterministic_matches_raw_formula():
    gen = np.random.default_rng(1)
    r = gen.uniform(0.1, 150, 10_000)
    d = demand_deterministic(r, SEC3)
    ref = [raw_demand(1e6 / 12 / x**2.8) for x in r]
    assert np.array_equal(d, ref)


def test_sec3_thresholds(sec3):
    th = compute_thresholds(sec3)
    assert th.n_max == 3
    assert th.radii[1] == pytest.approx(63.7, abs=0.05)
    assert th.radii[2] == pytest.approx(86.0, abs=0.05)
    assert th.radii[3] == 100.0
    unclamped = (1e6 / 12 / (2 ** (0.8 / 3) - 1)) ** (1 / 2.8)
    assert unclamped == pytest.approx(101.1, abs=0.05)
    assert np.all(np.diff(th.betas[1:]) < 0)
    assert np.all(np.diff(th.radii) >= 0)


def test_sec4_thresholds_ceiling_rule(sec4_ceiling):
    th = compute_thresholds(sec4_ceiling)
    assert th.n_max == 4
    np.testing.assert_allclose(th.betas[1:], [0.7411, 0.3195, 0.2030], atol=5e-5)
    assert th.betas[0] == math.inf
    assert th.beta_tilde[0] == 0.0


def test_single_class_cell():
    scen = Scenario(SEC3, TrafficParams(1e-5, 1 / 60), CellGeometry(30.0))
    th = compute_thresholds(scen)
    assert th.n_max == 1
    np.testing.assert_array_equal(th.radii, [0.0, 30.0])


def test_degenerate_cell_rejected():
    radio = RadioParams(gamma=2.8, c0=2e5, w=2.5e5, p_ratio=1e-3, mean_gain=1.0)
    scen = Scenario(radio, TrafficParams(1e-5, 1 / 60), CellGeometry(1e4))
    with pytest.raises(ValueError):
        compute_thresholds(scen)


def test_thresholds_agree_with_demand(sec3):
    th = compute_thresholds(sec3)
    gen = np.random.default_rng(2)
    r = gen.uniform(0, 100, 10_000)
    counted = 1 + np.sum(th.radii[None, 1:-1] < r[:, None], axis=1)
    counted = np.minimum(counted, th.n_max)
    assert np.array_equal(demand_deterministic(r, SEC3), counted)


def test_deterministic_monotone_with_jumps_at_radii(sec3):
    th = compute_thresholds(sec3)
    r = np.linspace(0, 100, 200_001)
    d = demand_deterministic(r, SEC3)
    assert np.all(np.diff(d) >= 0)
    jumps = r[1:][np.diff(d) > 0]
    assert len(jumps) == th.n_max - 1
    np.testing.assert_allclose(jumps, th.radii[1:-1], atol=1e-3)
    # each radius belongs to the lower class
    for j, rj in enumerate(th.radii[1:-1], start=1):
        assert demand_deterministic(rj, SEC3) == j
        assert demand_deterministic(np.nextafter(rj, np.inf), SEC3) == j + 1


def test_n_max_from_beta_min():
    assert n_max_from_beta_min(SEC4) == 4
    one = RadioParams(2.8, 2e5, 2.5e5, 1e6, beta_min=2**0.8 - 1)
    assert n_max_from_beta_min(one) == 1
    assert n_max_from_beta_min(RadioParams(2.8, 2e5, 2.5e5, 1e6, beta_min=1e9)) == 1
    with pytest.raises(ValueError):
        n_max_from_beta_min(SEC3)


def test_explicit_n_max_overrides():
    assert effective_n_max(RadioParams(2.8, 2e5, 2.5e5, 1e6, beta_min=0.2, n_max=3)) == 3


def test_shadowed_examples():
    tilde = 1e6 / SEC4.beta(np.arange(1, 4))
    assert demand_shadowed(1.0, tilde[0] / 2, SEC4) == 1
    assert classify_attenuated(tilde[0], SEC4) == 1
    assert classify_attenuated(tilde[1], SEC4) == 2
    assert classify_attenuated(np.nextafter(tilde[1], np.inf), SEC4) == 3


def test_shadowed_sir_examples():
    # ceil(0.8/log2(1.21)) = 3; the first SIR needing 4 subcarriers is below 0.2030
    assert raw_demand(0.21) == 3
    assert classify_attenuated(1e6 / 0.21, SEC4) == 3
    assert raw_demand(0.201) == 4
    assert classify_attenuated(1e6 / 0.201, SEC4) == 4


def test_outage_marker():
    assert classify_attenuated(1e6 / 0.19, SEC4) == OUTAGE
    capped = RadioParams(2.8, 2e5, 2.5e5, 1e6, beta_min=0.2, n_max=3)
    assert classify_attenuated(1e6 / 0.201, capped) == 3
    assert classify_attenuated(1e6 / 0.19, capped) == OUTAGE


def test_shadowed_rejects_bad_inputs():
    with pytest.raises(ValueError):
        demand_shadowed(1.0, 0.0, SEC4)
    with pytest.raises(ValueError):
        demand_shadowed(-1.0, 1.0, SEC4)


@settings(max_examples=200)
@given(st.floats(1e-2, 300), st.floats(1e-3, 1e3))
def test_shadowed_depends_on_product_only(r, s):
    x = s * r**2.8
    # at r = 1 the product is exactly x, so the pair (1, x) is an exact rescaling
    assert demand_shadowed(r, s, SEC4) == demand_shadowed(1.0, x, SEC4) == classify_attenuated(x, SEC4)


def test_class_membership_by_bisection():
    gen = np.random.default_rng(3)
    r = gen.uniform(0, 150, 10_000)
    s = 10 ** (gen.normal(6, math.sqrt(10), 10_000) / 10)
    x = s * r**2.8
    got = demand_shadowed(r, s, SEC4)
    tilde = np.concatenate([[0.0], 1e6 / SEC4.beta(np.arange(1, 4)), [1e6 / 0.2]])
    for xi, gi in zip(x, got):
        lo, hi = 0, len(tilde) - 1
        if xi > tilde[-1]:
            assert gi == OUTAGE
            continue
        # smallest k with xi <= tilde[k]
        while lo < hi:
            mid = (lo + hi) // 2
            if xi <= tilde[mid]:
                hi = mid
            else:
                lo = mid + 1
        assert gi == max(lo, 1)


def test_shadowed_matches_raw_formula():
    gen = np.random.default_rng(4)
    x = 10 ** gen.uniform(3, 8, 10_000)
    sir = 1e6 / x
    got = classify_attenuated(x, SEC4)
    ref = [OUTAGE if q < 0.2 else raw_demand(q) for q in sir]
    assert np.array_equal(got, ref)


def test_scenario_validation():
    traffic, cell = TrafficParams(1e-5, 1 / 60), CellGeometry(100.0)
    with pytest.raises(ValueError):
        Scenario(SEC4, traffic, cell, mode="shadowed")
    with pytest.raises(ValueError):
        Scenario(SEC3, traffic, cell, Shadowing(6, 3), mode="shadowed")
    with pytest.raises(ValueError):
        Scenario(SEC4, traffic, cell, Shadowing(6, 3), mode="bogus")
    with pytest.raises(ValueError):
        RadioParams(-1, 2e5, 2.5e5, 1e6)
    with pytest.raises(ValueError):
        TrafficParams(0, 1)
    with pytest.raises(ValueError):
        CellGeometry(0)


def test_sec3_mean_user_count(sec3):
    assert sec3.mean_users == pytest.approx(18.85, abs=0.005)
    assert sec3.traffic.rho == pytest.approx(1e-5)
    assert sec3.traffic.nu == pytest.approx(1 / 60)
