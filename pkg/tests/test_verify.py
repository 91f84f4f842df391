import numpy as np
import pytest

from sarlab import autodiff as ad
from sarlab.autodiff import Tensor
from sarlab.layers import ParamSet
from sarlab.verify import (
    DiscreteSeqDist, analytic_cf, empirical_cf, grad_check,
    theta_probe_grid, variance_floor,
)


def test_analytic_cf_uniform_01_at_pi():
    dist = DiscreteSeqDist(np.array([[0.0], [1.0]]), np.array([0.5, 0.5]))
    c, s = analytic_cf(dist, np.array([np.pi]))
    assert abs(c - (1 + np.cos(np.pi)) / 2) < 1e-15
    assert abs(s - np.sin(np.pi) / 2) < 1e-15


def test_analytic_cf_rademacher_symmetry():
    dist = DiscreteSeqDist(np.array([[1.0], [-1.0]]), np.array([0.5, 0.5]))
    thetas = np.linspace(-3, 3, 13)[:, None]
    c, s = analytic_cf(dist, thetas)
    np.testing.assert_allclose(c, np.cos(thetas[:, 0]), atol=1e-15)
    np.testing.assert_allclose(s, 0.0, atol=1e-15)


def test_cf_at_zero_is_one():
    rng = np.random.default_rng(0)
    support = rng.standard_normal((5, 3))
    p = rng.random(5)
    dist = DiscreteSeqDist(support, p / p.sum())
    c, s = analytic_cf(dist, np.zeros(3))
    assert abs(c - 1.0) < 1e-12 and s == 0.0


def test_analytic_cf_modulus_bounded():
    rng = np.random.default_rng(1)
    for _ in range(5):
        support = rng.standard_normal((6, 2)) * 3
        p = rng.random(6)
        dist = DiscreteSeqDist(support, p / p.sum())
        thetas = theta_probe_grid(2, rng, n_random=32)
        c, s = analytic_cf(dist, thetas)
        assert np.all(c * c + s * s <= 1.0 + 1e-12)


def test_empirical_single_sample_is_pointwise_cf():
    x = np.array([0.4, -1.2])
    theta = np.array([2.0, 0.5])
    c, s = empirical_cf(x[None, :], theta)
    ip = float(theta @ x)
    assert abs(c - np.cos(ip)) < 1e-15
    assert abs(s - np.sin(ip)) < 1e-15


def test_empirical_matches_analytic_within_002():
    rng = np.random.default_rng(2)
    support = np.array([[0.0, 1.0], [1.0, -1.0], [-0.5, 0.5]])
    dist = DiscreteSeqDist(support, np.array([0.2, 0.5, 0.3]))
    samples = dist.sample(100_000, rng)
    thetas = theta_probe_grid(2, rng)
    ce, se = empirical_cf(samples, thetas)
    ca, sa = analytic_cf(dist, thetas)
    assert np.max(np.abs(ce - ca)) < 0.02
    assert np.max(np.abs(se - sa)) < 0.02


def test_gaussian_closed_form():
    rng = np.random.default_rng(3)
    samples = rng.standard_normal((100_000, 1))
    thetas = np.linspace(-2, 2, 9)[:, None]
    c, s = empirical_cf(samples, thetas)
    np.testing.assert_allclose(c, np.exp(-thetas[:, 0] ** 2 / 2), atol=0.02)
    np.testing.assert_allclose(s, 0.0, atol=0.02)


def test_cf_uniqueness_probe():
    # different supports must differ somewhere on the probe grid
    rng = np.random.default_rng(4)
    d1 = DiscreteSeqDist(np.array([[0.0], [1.0]]), np.array([0.5, 0.5]))
    d2 = DiscreteSeqDist(np.array([[0.0], [0.9]]), np.array([0.5, 0.5]))
    thetas = theta_probe_grid(1, rng)
    c1, s1 = analytic_cf(d1, thetas)
    c2, s2 = analytic_cf(d2, thetas)
    assert np.max(np.abs(c1 - c2) + np.abs(s1 - s2)) > 1e-6


def test_grad_check_linear_loss_near_machine_precision():
    ps = ParamSet("t")
    ps.add("w", Tensor(np.array([0.7, -1.1, 2.0])))
    coeff = np.array([1.0, 2.0, 3.0])
    err = grad_check(lambda: ad.sum_(ps["w"] * coeff), ps)
    assert err < 1e-9


def test_grad_check_detects_corrupted_gradient():
    ps = ParamSet("t")
    ps.add("w", Tensor(np.array([0.5, 1.5])))

    def loss():
        out = ad.sum_(ad.square(ps["w"]))
        return out * 1.01 if loss.corrupt else out

    loss.corrupt = False
    assert grad_check(loss, ps) < 1e-8

    # corrupt only the analytic gradient by scaling the recorded loss,
    # while the numeric re-evaluations see the clean one
    class Corrupter:
        def __init__(self):
            self.first = True

        def __call__(self):
            out = ad.sum_(ad.square(ps["w"]))
            if self.first:
                self.first = False
                return out * 1.01
            return out

    assert grad_check(Corrupter(), ps) > 1e-3


def test_grad_check_small_mlp_vs_finite_differences():
    from sarlab.layers import build_network, mlp_specs
    rng = np.random.default_rng(5)
    net = build_network(mlp_specs(4, [8, 8], 2), rng)
    x = rng.standard_normal((6, 4))
    y = rng.standard_normal((6, 2))

    def loss():
        pred = net.forward(x)
        return ad.mean_(ad.square(pred - y))

    assert grad_check(loss, net.params) < 1e-6


def test_variance_floor_zero_for_constant_targets():
    theta = np.full((50, 1), np.pi / 3)
    aseq = np.ones((50, 1))
    assert variance_floor(theta, aseq) < 1e-15


def test_variance_floor_rademacher_is_one():
    # theta = pi/2, a in {-1, +1} equally: targets (0, +/-1), mean (0, 0)
    aseq = np.array([[1.0], [-1.0]] * 500)
    theta = np.full((1000, 1), np.pi / 2)
    assert abs(variance_floor(theta, aseq) - 1.0) < 1e-12


def test_variance_floor_nonnegative():
    rng = np.random.default_rng(6)
    for _ in range(10):
        theta = rng.standard_normal((64, 3))
        aseq = rng.uniform(-1, 1, (64, 3))
        assert variance_floor(theta, aseq) >= 0.0


def test_shape_mismatch_raises():
    with pytest.raises(ValueError):
        variance_floor(np.ones((4, 2)), np.ones((4, 3)))
