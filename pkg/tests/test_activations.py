import math

import numpy as np
import pytest

from lmcnet.activations import SIGMOID, TANH, get_activation

ACTS = [TANH, SIGMOID]


@pytest.mark.parametrize("act", ACTS, ids=lambda a: a.kind)
def test_bounds_hold_on_dense_grid(act):
    # |sigma| <= B_sigma, |sigma'| <= M_D, |sigma''| <= M_D' on [-50, 50]
    z = np.linspace(-50.0, 50.0, 200001)
    assert np.abs(act.sigma(z)).max() <= act.B_sigma + 1e-15
    assert np.abs(act.dsigma(z)).max() <= act.M_D + 1e-15
    assert np.abs(act.d2sigma(z)).max() <= act.M_D_prime + 1e-15


@pytest.mark.parametrize("act", ACTS, ids=lambda a: a.kind)
def test_sup_constants_are_tight(act):
    # grid maximization recovers the analytic sup constants
    z = np.linspace(-5.0, 5.0, 2000001)
    assert np.abs(act.dsigma(z)).max() == pytest.approx(act.M_D, rel=1e-9)
    assert np.abs(act.d2sigma(z)).max() == pytest.approx(
        act.M_D_prime, rel=1e-9)


def test_tanh_m2_closed_form():
    # sup |tanh''| = 4 / (3 sqrt(3))
    assert TANH.M_D_prime == pytest.approx(4.0 / (3.0 * math.sqrt(3.0)))
    assert TANH.M_D_prime == pytest.approx(0.7698004, abs=1e-7)


def test_origin_values():
    assert TANH.c == 0.0
    assert SIGMOID.c == 0.5
    assert float(TANH.sigma(0.0)) == 0.0
    assert float(SIGMOID.sigma(0.0)) == 0.5


@pytest.mark.parametrize("act", ACTS, ids=lambda a: a.kind)
def test_no_overflow_at_extreme_arguments(act):
    z = np.array([-1e6, -750.0, 750.0, 1e6])
    out = act.sigma(z)
    assert np.all(np.isfinite(out))
    assert np.all(np.isfinite(act.dsigma(z)))
    assert np.all(np.isfinite(act.d2sigma(z)))


def test_derivatives_match_finite_differences():
    z = np.linspace(-3.0, 3.0, 101)
    eps = 1e-6
    for act in ACTS:
        fd1 = (act.sigma(z + eps) - act.sigma(z - eps)) / (2 * eps)
        np.testing.assert_allclose(act.dsigma(z), fd1, atol=1e-9)
        fd2 = (act.dsigma(z + eps) - act.dsigma(z - eps)) / (2 * eps)
        np.testing.assert_allclose(act.d2sigma(z), fd2, atol=1e-9)


def test_lipschitz_constants_dominate_derivative_sups():
    # L bounds sigma' and L_sigma_prime bounds sigma''
    for act in ACTS:
        assert act.L >= act.M_D
        assert act.L_sigma_prime >= act.M_D_prime - 1e-15


def test_get_activation():
    assert get_activation("tanh") is TANH
    assert get_activation("sigmoid") is SIGMOID
    with pytest.raises(ValueError):
        get_activation("relu")
