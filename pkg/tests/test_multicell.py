import math

import numpy as np
import pytest

from ofdmaloss import montecarlo as mc
from ofdmaloss import multicell as mcl
from ofdmaloss import quadrature
from ofdmaloss.moments import class_masses_shadowed, moments_from_classes
from ofdmaloss.specfun import lognormal_attenuation_cdf


@pytest.fixture(scope="module")
def sec5_masses(sec5):
    return mcl.multicell_class_masses(sec5)


def test_hex_layout():
    lay = mcl.hex_layout(100.0)
    np.testing.assert_allclose(lay.interferers[1], [100.0, 100 * math.sqrt(3)])
    np.testing.assert_allclose(np.hypot(*lay.interferers.T), 200.0, rtol=1e-15)
    c, s = math.cos(math.pi / 3), math.sin(math.pi / 3)
    rotated = lay.interferers @ np.array([[c, s], [-s, c]])
    d = np.hypot(*(rotated[:, None, :] - lay.interferers[None, :, :]).transpose(2, 0, 1))
    assert np.all(d.min(axis=1) <= 1e-9)
    with pytest.raises(ValueError):
        mcl.hex_layout(0.0)


def test_layout_validation_and_io(tmp_path):
    with pytest.raises(ValueError):
        mcl.AntennaLayout(np.zeros(2), np.array([[1.0, 0.0], [1.0, 0.0]]))
    with pytest.raises(ValueError):
        mcl.AntennaLayout(np.zeros(2), np.zeros((1, 2)))
    lay = mcl.hex_layout(100.0)
    path = tmp_path / "layout.txt"
    mcl.write_layout(lay, path)
    back = mcl.read_layout(path)
    assert np.array_equal(back.serving, lay.serving) and np.array_equal(back.interferers, lay.interferers)
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2 3\n")
    with pytest.raises(ValueError):
        mcl.read_layout(bad)


def test_scenario_validation(sec5):
    with pytest.raises(ValueError):
        sec5.with_(association="nearest")
    with pytest.raises(ValueError):
        sec5.with_(region="square")
    with pytest.raises(ValueError):
        sec5.with_(layout=mcl.AntennaLayout(np.zeros(2)), region="cell")
    assert sec5.with_(region="disk").radius == 300.0


def test_serve_probability_examples(sec5):
    disk = sec5.with_(region="disk")
    assert mcl.serve_probability(np.zeros(2), 0.5, disk) == 1.0
    lone = disk.with_(layout=mcl.AntennaLayout(np.zeros(2)))
    assert np.all(mcl.serve_probability(np.array([[3.0, 4.0], [50.0, 0.0]]), np.array([0.1, 2.0]), lone) == 1)
    pair = disk.with_(layout=mcl.AntennaLayout(np.zeros(2), np.array([[200.0, 0.0]])))
    x = np.array([100.0, 37.0])
    for g in (0.05, 0.3, 1.0, 4.0):
        expected = 1 - lognormal_attenuation_cdf(1 / g, 6.0, math.sqrt(10))
        assert mcl.serve_probability(x, g, pair) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(ValueError):
        mcl.serve_probability(x, 0.0, pair)


def test_serve_probability_properties(sec5):
    disk = sec5.with_(region="disk")
    gen = np.random.default_rng(0)
    x = gen.uniform(-300, 300, (500, 2))
    g = np.sort(10 ** gen.uniform(-3, 2, 20))
    p = mcl.serve_probability(x[:, None, :], g[None, :], disk)
    assert np.all((p >= 0) & (p <= 1))
    assert np.all(np.diff(p, axis=1) >= 0)
    # dropping an interferer can only help the serving antenna
    fewer = disk.with_(layout=mcl.AntennaLayout(np.zeros(2), disk.layout.interferers[:-1]))
    q = mcl.serve_probability(x[:, None, :], g[None, :], fewer)
    assert np.all(p <= q * (1 + 1e-12))


def test_best_server_sum_rule_pointwise(sec5):
    disk = sec5.with_(region="disk")
    gen = np.random.default_rng(1)
    x = gen.uniform(-350, 350, (2000, 2))
    total = sum(mcl.best_server_probability(x, disk.with_(layout=disk.layout.relabel(k)))
                for k in range(7))
    np.testing.assert_allclose(total, 1.0, atol=1e-10)


def test_best_server_sum_rule_integrated(sec5):
    disk = sec5.with_(region="disk")
    layouts = [disk.with_(layout=disk.layout.relabel(k)) for k in range(7)]

    def f(r, t):
        r, t = np.broadcast_arrays(r, t)
        x = np.stack([r * np.cos(t), r * np.sin(t)], axis=-1)
        return sum(mcl.best_server_probability(x, s) for s in layouts)

    spec = quadrature.QuadSpec(abs_tol=1e-6, rel_tol=1e-8)
    total = quadrature.integrate_polar_disk(f, 300.0, spec)
    assert total == pytest.approx(math.pi * 300.0**2, rel=1e-8)


def test_cell_area():
    assert mcl.cell_area(mcl.hex_layout(100.0)) == pytest.approx(2 * math.sqrt(3) * 100.0**2, rel=1e-12)


def test_reduces_to_single_cell(sec4):
    for policy in ("clamp_to_nmax", "exclude"):
        base = sec4.with_(mode="multicell", outage_policy=policy)
        lone = mcl.MulticellScenario(base, mcl.AntennaLayout(np.zeros(2)), region_radius=100.0)
        got = mcl.multicell_class_masses(lone).lambdas
        ref = class_masses_shadowed(sec4.with_(outage_policy=policy)).lambdas
        np.testing.assert_allclose(got, ref, rtol=1e-6)


@pytest.mark.xfail(strict=True, reason="far from a finite ring every antenna is nearly equidistant, "
                                       "so y0 keeps ~1/7 of admissible users beyond 3R and the "
                                       "last class still grows ~18% from 3R to 4R")
def test_truncation_3r_to_4r_each_class(sec5):
    disk = sec5.with_(region="disk")
    l3 = mcl.multicell_class_masses(disk).lambdas
    l4 = mcl.multicell_class_masses(disk.with_(region_radius=400.0)).lambdas
    assert np.all(np.abs(l4 / l3 - 1) < 0.005)


def test_truncation_convergence(sec5):
    disk = sec5.with_(region="disk")
    l3, l4, l5, l6 = (mcl.multicell_class_masses(disk.with_(region_radius=100.0 * k)).lambdas
                      for k in (3, 4, 5, 6))
    assert abs(l4.sum() / l3.sum() - 1) < 0.005
    assert np.all(np.abs(l6 / l5 - 1) < 0.005)
    # admission (beta_min) makes the far field summable
    assert np.all(np.abs(l6 - l5) <= np.abs(l5 - l4)) and np.all(np.abs(l5 - l4) <= np.abs(l4 - l3))


def test_far_field_share(sec5):
    far = mcl.best_server_probability(np.array([[5000.0, 0.0], [0.0, -5000.0]]), sec5)
    np.testing.assert_allclose(far, 1 / 7, atol=2e-3)


def test_sec5_anchor(sec5_masses, anchors):
    mom = moments_from_classes(sec5_masses)
    assert mom.m == pytest.approx(anchors["paper_sec5.m"], rel=1e-7)
    assert mom.v == pytest.approx(anchors["paper_sec5.v"], rel=1e-7)


def test_moment_ordering_all_variants(sec5):
    for assoc in mcl.ASSOCIATIONS:
        for region in mcl.REGIONS:
            lam = mcl.multicell_class_masses(sec5.with_(association=assoc, region=region))
            mom = moments_from_classes(lam)
            assert mom.m <= mom.v * (1 + 1e-12) <= lam.n_max * mom.m * (1 + 1e-12) ** 2


def test_literal_association_is_different(sec5, sec5_masses):
    lit = mcl.multicell_class_masses(sec5.with_(association="paper_literal", region="disk"))
    assert moments_from_classes(lit).m < 0.5 * moments_from_classes(sec5_masses).m


@pytest.mark.parametrize("region", ["cell", "disk"])
def test_mc_mean_matches_quadrature(sec5, region):
    scen = sec5.with_(region=region)
    mom = moments_from_classes(mcl.multicell_class_masses(scen))
    t = mcl.simulate_total_demand_multicell(scen, 100_000, seed=31).astype(float)
    assert abs(t.mean() - mom.m) <= 4 * t.std(ddof=1) / math.sqrt(t.size)
    # compound-Poisson variance
    assert t.var(ddof=1) == pytest.approx(mom.v, rel=4 * math.sqrt(2 / t.size) * 3)


def test_unreachable_budget(sec5):
    with pytest.warns(RuntimeWarning):
        est = mcl.estimate_loss_multicell(sec5, 1e6, 2000, seed=1)
    assert est.p_hat == 0.0
    with pytest.raises(ValueError):
        mcl.estimate_loss_multicell(sec5, 10.0, 10, seed=1)


def test_single_antenna_matches_single_cell_mc(sec4):
    base = sec4.with_(mode="multicell")
    lone = mcl.MulticellScenario(base, mcl.AntennaLayout(np.zeros(2)), region_radius=100.0)
    n0 = 1.5 * moments_from_classes(class_masses_shadowed(sec4)).m
    a = mcl.estimate_loss_multicell(lone, n0, 200_000, seed=3)
    b = mc.estimate_loss(sec4, n0, 200_000, seed=4)
    assert a.ci_low <= b.ci_high and b.ci_low <= a.ci_high


def test_multicell_worker_independence(sec5):
    ref = mcl.simulate_total_demand_multicell(sec5, 25_000, seed=5, workers=1)
    assert np.array_equal(mcl.simulate_total_demand_multicell(sec5, 25_000, seed=5, workers=3), ref)


def test_region_cell_users_inside(sec5):
    gen = np.random.default_rng(2)
    counts, pts = mcl._sample_region(sec5, gen, 1000)
    assert counts.sum() == len(pts)
    # every sampled user is closer to the serving antenna than to any other
    d0 = np.hypot(*pts.T)
    dj = np.hypot(pts[:, None, 0] - sec5.layout.interferers[:, 0], pts[:, None, 1] - sec5.layout.interferers[:, 1])
    assert np.all(d0[:, None] <= dj + 1e-9)
    area = mcl.cell_area(sec5.layout)
    lam = sec5.base.traffic.intensity * area
    assert abs(counts.mean() - lam) <= 4 * math.sqrt(lam / counts.size)
