import math

import numpy as np
import pytest

from lmcnet import ProblemSpec, chain_rng
from lmcnet.experiments import fixed_outer_weights, generate_sine_data


def sine_spec(width=16, n=200, lam=2.1, noise_sigma=0.0, seed=0,
              loss_kind="mse"):
    """The standard experimental configuration at a given width."""
    x_tr, y_tr, _, _ = generate_sine_data(n, 1, noise_sigma, seed)
    if loss_kind == "bce":
        y_tr = np.where(y_tr >= 0, 1.0, -1.0)
    return ProblemSpec(a=fixed_outer_weights(width), X=x_tr, y=y_tr,
                       loss_kind=loss_kind, lam=lam, B_x=0.5)


def pure_reg_spec(lam=2.0, p=1, d=1):
    """Zero outer weights and zero labels: the loss is (lam/2)||W||^2."""
    return ProblemSpec(a=np.zeros(p), X=np.zeros((1, d)), y=np.zeros(1),
                       loss_kind="mse", lam=lam, B_x=1.0, B_y=1.0)


def random_spec(rng, width, d=1, n=10, loss_kind="mse", lam=None):
    if lam is None:
        lam = float(rng.uniform(0.5, 3.0))
    X = rng.uniform(-0.5, 0.5, size=(n, d))
    if loss_kind == "bce":
        y = rng.choice([-1.0, 1.0], size=n)
    else:
        y = rng.uniform(-2.0, 2.0, size=n)
    a = rng.uniform(-1.0, 1.0, size=width)
    return ProblemSpec(a=a, X=X, y=y, loss_kind=loss_kind, lam=lam)


@pytest.fixture
def rng():
    return chain_rng(1234, 0)
