import numpy as np
import pytest

from lmcnet import TANH, SIGMOID, gradient
from lmcnet.activations import ActivationSpec
from lmcnet.diagnostics import _fd_gradient

from conftest import pure_reg_spec, random_spec


def test_pure_regularizer_gradient_is_lam_w(rng):
    spec = pure_reg_spec(lam=2.0, p=3, d=2)
    W = rng.normal(size=(3, 2))
    np.testing.assert_array_equal(gradient(spec, TANH, W), 2.0 * W)


def test_bce_gradient_at_zero_closed_form(rng):
    # f = 0 makes the logistic factor 1/2: row k = (-1/2n) sum y_i a_k x_i
    spec = random_spec(rng, 4, d=2, n=9, loss_kind="bce", lam=0.0)
    g = gradient(spec, TANH, np.zeros((4, 2)))
    expected = np.outer(-spec.a / 2.0,
                        np.mean(spec.y[:, None] * spec.X, axis=0))
    np.testing.assert_allclose(g, expected, atol=1e-14)


@pytest.mark.parametrize("kind", ["mse", "bce"])
@pytest.mark.parametrize("width", [1, 4, 16])
def test_gradient_matches_finite_differences(rng, kind, width):
    for _ in range(4):
        spec = random_spec(rng, width, d=2, loss_kind=kind)
        W = rng.uniform(-2.0, 2.0, size=(width, 2))
        g = gradient(spec, TANH, W)
        fd = _fd_gradient(spec, TANH, W, 1e-5)
        scale = np.maximum(np.abs(fd), 0.01 * np.abs(fd).max() + 1e-10)
        assert np.max(np.abs(g - fd) / scale) < 1e-5


def test_saturated_bce_gradient_still_accurate(rng):
    # large weights drive the logits deep into saturation
    spec = random_spec(rng, 2, d=1, n=5, loss_kind="bce")
    W = 40.0 * rng.choice([-1.0, 1.0], size=(2, 1))
    g = gradient(spec, TANH, W)
    fd = _fd_gradient(spec, TANH, W, 1e-5)
    assert np.all(np.isfinite(g))
    scale = np.maximum(np.abs(fd), 0.01 * np.abs(fd).max() + 1e-10)
    assert np.max(np.abs(g - fd) / scale) < 1e-4


def test_sigmoid_gradient_matches_finite_differences(rng):
    spec = random_spec(rng, 4, d=2, loss_kind="mse")
    W = rng.uniform(-2.0, 2.0, size=(4, 2))
    g = gradient(spec, SIGMOID, W)
    fd = _fd_gradient(spec, SIGMOID, W, 1e-5)
    scale = np.maximum(np.abs(fd), 0.01 * np.abs(fd).max() + 1e-10)
    assert np.max(np.abs(g - fd) / scale) < 1e-5
