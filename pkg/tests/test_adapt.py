"""Gradient-descent parameter updates: weights move, centers move, widths don't."""

import numpy as np
import pytest

from gfnc.adapt import AdaptConfig, adapt_step
from gfnc.network import FnnNetwork, FuzzyNode

EXP_M025 = 0.7788007830714049

# hand-substituted center update for the scalar instance below:
# 1e-3 * 0.015 * 0.5 * 1 * exp(-0.25) * 2 * (1 - 0) / 4
DM_ORACLE = 2.9205029365177683e-06
# matching weight update: 1e-3 * 0.015 * 0.5 * exp(-0.25)
DXI_ORACLE = 5.8410058730355365e-06


def _cfg(**overrides):
    base = dict(eta_xi=0.015, eta_m=0.015, update_dt=1e-3)
    base.update(overrides)
    return AdaptConfig(**base)


def _net(m, sigma, xi):
    node = FuzzyNode(m=np.asarray(m, float), sigma=np.asarray(sigma, float), xi=xi)
    return FnnNetwork(n=node.dim, nodes=[node])


def _step(net, z, s, cfg):
    z = np.asarray(z, float)
    _, gamma = net.evaluate(z)
    adapt_step(net, z, s, gamma, cfg)


def test_zero_s_is_identity():
    net = _net([0.3, -0.5], [1.0, 2.0], xi=0.7)
    m0 = net.nodes[0].m.copy()
    _step(net, [1.0, 1.0], 0.0, _cfg())
    assert net.nodes[0].xi == 0.7
    assert np.array_equal(net.nodes[0].m, m0)


def test_center_case():
    # z == m: weight moves by dt*eta*s, center factor (z - m) vanishes
    net = _net([1.0, 2.0], [2.0, 2.0], xi=0.0)
    _step(net, [1.0, 2.0], 1.0, _cfg())
    assert net.nodes[0].xi == pytest.approx(1e-3 * 0.015, rel=1e-15)
    assert np.array_equal(net.nodes[0].m, np.array([1.0, 2.0]))


def test_scalar_oracle():
    net = _net([0.0], [2.0], xi=1.0)
    _step(net, [1.0], 0.5, _cfg())
    assert net.nodes[0].m[0] == pytest.approx(DM_ORACLE, rel=1e-14)
    assert net.nodes[0].xi == pytest.approx(1.0 + DXI_ORACLE, rel=1e-14)


def test_center_update_uses_pre_update_weight():
    # make the weight update large enough that using the post-update value
    # would change the center move by a factor of a few
    net = _net([0.0], [2.0], xi=1.0)
    cfg = _cfg(eta_xi=2000.0)
    _step(net, [1.0], 0.5, cfg)
    expected_dm = 1e-3 * 0.015 * 0.5 * 1.0 * EXP_M025 * 2.0 * 1.0 / 4.0
    assert net.nodes[0].m[0] == pytest.approx(expected_dm, rel=1e-12)


def test_sigma_bit_identical():
    rng = np.random.default_rng(41)
    nodes = [
        FuzzyNode(m=rng.uniform(-2, 2, 2), sigma=rng.uniform(0.5, 3, 2), xi=0.1)
        for _ in range(4)
    ]
    net = FnnNetwork(n=2, nodes=nodes)
    before = [node.sigma.tobytes() for node in net.nodes]
    for _ in range(50):
        _step(net, rng.uniform(-2, 2, 2), float(rng.uniform(-1, 1)), _cfg())
    after = [node.sigma.tobytes() for node in net.nodes]
    assert before == after


def test_linear_in_s_and_rates():
    def deltas(s, eta_xi, eta_m):
        net = _net([0.0], [2.0], xi=1.0)
        _step(net, [1.0], s, _cfg(eta_xi=eta_xi, eta_m=eta_m))
        return net.nodes[0].xi - 1.0, net.nodes[0].m[0]

    d1 = deltas(0.25, 0.015, 0.015)
    d2 = deltas(0.5, 0.015, 0.015)
    assert d2[0] == pytest.approx(2 * d1[0], rel=1e-12)
    assert d2[1] == pytest.approx(2 * d1[1], rel=1e-12)
    d3 = deltas(0.25, 0.045, 0.03)
    assert d3[0] == pytest.approx(3 * d1[0], rel=1e-12)
    assert d3[1] == pytest.approx(2 * d1[1], rel=1e-12)


def test_updates_match_output_gradients():
    rng = np.random.default_rng(43)
    for _ in range(20):
        n = int(rng.integers(1, 4))
        nodes = [
            FuzzyNode(
                m=rng.uniform(-3, 3, n),
                sigma=rng.uniform(0.5, 3, n),
                xi=float(rng.uniform(-2, 2)),
            )
            for _ in range(int(rng.integers(1, 6)))
        ]
        net = FnnNetwork(n=n, nodes=nodes)
        z = rng.uniform(-3, 3, n)
        s = float(rng.uniform(-1, 1))
        d_xi, d_m = net.output_gradients(z)
        xi0 = np.array([node.xi for node in net.nodes])
        m0 = np.stack([node.m for node in net.nodes])
        cfg = _cfg()
        _step(net, z, s, cfg)
        # recovering the tiny increment by subtraction loses ~eps*|param|
        for k, node in enumerate(net.nodes):
            assert node.xi - xi0[k] == pytest.approx(
                cfg.update_dt * cfg.eta_xi * s * d_xi[k], rel=1e-9, abs=1e-14
            )
            assert np.allclose(
                node.m - m0[k],
                cfg.update_dt * cfg.eta_m * s * d_m[k],
                rtol=1e-9,
                atol=1e-14,
            )


def test_multi_node_each_updated_by_own_activation():
    net = FnnNetwork(
        n=1,
        nodes=[
            FuzzyNode(m=np.array([0.0]), sigma=np.array([2.0]), xi=1.0),
            FuzzyNode(m=np.array([1.0]), sigma=np.array([2.0]), xi=1.0),
        ],
    )
    _step(net, [1.0], 1.0, _cfg())
    # node 1 sits at the input: larger activation, larger weight move
    d0 = net.nodes[0].xi - 1.0
    d1 = net.nodes[1].xi - 1.0
    assert d1 > d0 > 0.0
    assert d1 == pytest.approx(1e-3 * 0.015, rel=1e-14)


def test_empty_network_is_noop():
    net = FnnNetwork(n=2)
    _step(net, [1.0, 1.0], 0.5, _cfg())
    assert net.R == 0


def test_optional_update_clamp():
    net = _net([0.0], [2.0], xi=1.0)
    cfg = _cfg(eta_xi=1e6, max_delta=1e-3)
    _step(net, [1.0], 1.0, cfg)
    assert net.nodes[0].xi - 1.0 == pytest.approx(1e-3, abs=1e-15)


def test_gamma_length_checked():
    net = _net([0.0], [2.0], xi=1.0)
    with pytest.raises(ValueError):
        adapt_step(net, np.array([1.0]), 0.5, np.array([0.5, 0.5]), _cfg())


def test_config_validation():
    with pytest.raises(ValueError):
        _cfg(eta_xi=0.0)
    with pytest.raises(ValueError):
        _cfg(eta_m=-1.0)
    with pytest.raises(ValueError):
        _cfg(update_dt=0.0)
    with pytest.raises(ValueError):
        _cfg(max_delta=0.0)
