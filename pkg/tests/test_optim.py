import warnings

import numpy as np
import pytest

from sarlab.autodiff import Tensor
from sarlab.layers import ParamSet
from sarlab.optim import Adam, ema_update


def make_params(values: dict[str, np.ndarray]) -> ParamSet:
    ps = ParamSet("test")
    for n, v in values.items():
        ps.add(n, Tensor(np.asarray(v, dtype=np.float64)))
    return ps


def test_zero_gradient_leaves_parameter_unchanged():
    ps = make_params({"w": [1.0, 2.0]})
    opt = Adam(ps, lr=1e-3)
    opt.step({"w": np.zeros(2)})
    np.testing.assert_array_equal(ps["w"].data, [1.0, 2.0])
    assert opt.t == 1


def test_first_step_closed_form():
    # at t=1: m_hat = g, v_hat = g^2, update = -lr * g / (|g| + eps)
    g = np.array([0.3, -2.0, 0.0001])
    ps = make_params({"w": np.zeros(3)})
    lr, eps = 5e-4, 1e-8
    opt = Adam(ps, lr=lr, eps=eps)
    opt.step({"w": g})
    expected = -lr * g / (np.abs(g) + eps)
    np.testing.assert_allclose(ps["w"].data, expected, rtol=1e-12)


def test_default_learning_rate_is_5em4():
    opt = Adam(make_params({"w": [0.0]}))
    assert opt.lr == 5e-4


def test_missing_gradient_skipped_with_warning():
    ps = make_params({"a": [1.0], "b": [2.0]})
    opt = Adam(ps, lr=0.1)
    with pytest.warns(UserWarning, match="no gradient for 'b'"):
        opt.step({"a": np.array([1.0])})
    np.testing.assert_array_equal(ps["b"].data, [2.0])
    assert ps["a"].data[0] != 1.0


def test_step_counter_strictly_increases():
    ps = make_params({"w": [0.0]})
    opt = Adam(ps)
    for expected in (1, 2, 3):
        opt.step({"w": np.array([1.0])})
        assert opt.t == expected


def test_ema_tau_one_copies_online():
    tgt = make_params({"w": [[0.0, 0.0]]})
    src = make_params({"w": [[1.0, -3.0]]})
    ema_update(tgt, src, tau=1.0)
    np.testing.assert_array_equal(tgt["w"].data, src["w"].data)


def test_ema_tau_zero_is_identity():
    tgt = make_params({"w": [5.0]})
    src = make_params({"w": [9.0]})
    ema_update(tgt, src, tau=0.0)
    np.testing.assert_array_equal(tgt["w"].data, [5.0])


def test_ema_scalar_arithmetic():
    tgt = make_params({"w": [0.0]})
    src = make_params({"w": [1.0]})
    ema_update(tgt, src, tau=0.01)
    np.testing.assert_allclose(tgt["w"].data, [0.01])


def test_ema_fixed_point_when_equal():
    vals = np.random.default_rng(0).standard_normal((3, 4))
    tgt = make_params({"w": vals.copy()})
    src = make_params({"w": vals.copy()})
    for tau in (0.0, 0.3, 1.0):
        ema_update(tgt, src, tau=tau)
        np.testing.assert_allclose(tgt["w"].data, vals, atol=1e-15)


def test_ema_shape_mismatch_raises():
    tgt = make_params({"w": np.zeros(3)})
    src = make_params({"w": np.zeros(4)})
    with pytest.raises(ValueError):
        ema_update(tgt, src, tau=0.5)


def test_adam_state_roundtrip():
    ps = make_params({"w": [1.0, 2.0]})
    opt = Adam(ps, lr=0.01)
    opt.step({"w": np.array([0.5, -0.5])})
    arrays = opt.state_arrays("adam")
    other = Adam(make_params({"w": [0.0, 0.0]}), lr=0.01)
    other.load_state_arrays("adam", arrays)
    assert other.t == opt.t
    np.testing.assert_array_equal(other.m["w"], opt.m["w"])
    np.testing.assert_array_equal(other.v["w"], opt.v["w"])
