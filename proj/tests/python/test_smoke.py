import math

import pytest

import c2poly


def test_version():
    assert c2poly.version()


def test_polynomial_eval():
    p = c2poly.Polynomial(2, 1, [1.0, 2.0, 3.0])
    # affine: constant term at the origin, odd part cancels
    assert p([0.0, 0.0]) == pytest.approx(1.0)
    assert p([0.5, -1.0]) + p([-0.5, 1.0]) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        p([1.0])


def test_net_is_separated():
    disk = c2poly.Domain.disk()
    assert disk.area == pytest.approx(math.pi)
    net = c2poly.greedy_maximal_net(disk, 0.3, 20000, 1)
    assert len(net) > 5
    assert c2poly.min_separation(disk, net) >= 0.3 * (1 - 1e-12)
    assert all(disk.contains(c) for c in net.centers)


def test_nnls_centre():
    rule = c2poly.nnls_weights(c2poly.Domain.disk(), [(0.0, 0.0)], 1)
    assert rule.weights[0] == pytest.approx(math.pi)


def test_parabola_round_trip():
    g = c2poly.decompose_boundary(c2poly.Domain.disk())[0]
    fam = c2poly.ParabolaFamily(g, c2poly.ParabolaFamily.a_bar(g, c2poly.ParabolaFamily.default_M(g)))
    z, t = 0.3 * fam.a, 0.5 * fam.a0
    x, y = fam.phi(z, t)
    assert fam.phi_inverse(x, y) == pytest.approx((z, t), abs=1e-10)
    assert fam.jacobian(z, t) > 0


def test_config_error_key():
    with pytest.raises(c2poly.ConfigError) as e:
        c2poly.run({"schema": c2poly.CONFIG_SCHEMA, "kind": "mz", "params": {"foo": 1}})
    assert e.value.key == "params.foo"


def test_run_experiment(tmp_path):
    files, summary = c2poly.run({"schema": c2poly.CONFIG_SCHEMA, "kind": "net", "params": {"delta": 0.3}}, tmp_path)
    assert summary["config"]["kind"] == "net"
    assert (tmp_path / "net.csv").exists()
    assert files
