"""Pure-numpy reference kernels; same API as the Cython extension.

Shapes: W (p, d), X (n, d), y (n,), a (p,), noise (steps, p, d).
"""

from __future__ import annotations

import numpy as np

_SQRT2 = np.sqrt(2.0)


def _sigma(z, tanh_act):
    if tanh_act:
        return np.tanh(z)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _dsigma_from_sigma(s, tanh_act):
    if tanh_act:
        return 1.0 - s * s
    return s * (1.0 - s)


def _softplus(u):
    # log(1 + e^u) without overflow
    return np.maximum(u, 0.0) + np.log1p(np.exp(-np.abs(u)))


def loss_value(W, X, y, a, lam, mse, tanh_act):
    f = a @ _sigma(W @ X.T, tanh_act)
    reg = 0.5 * lam * float(np.sum(W * W))
    if mse:
        return 0.5 * float(np.mean((y - f) ** 2)) + reg
    return float(np.mean(_softplus(-y * f))) + reg


def gradient(W, X, y, a, lam, mse, tanh_act):
    n = X.shape[0]
    z = W @ X.T
    s = _sigma(z, tanh_act)
    f = a @ s
    if mse:
        r = (f - y) / n
    else:
        # dL/df = -y * logistic(-y f)
        r = -y * _sigma(-(y * f), False) / n
    G = (a[:, None] * _dsigma_from_sigma(s, tanh_act) * r[None, :]) @ X
    G += lam * W
    return G


def chain_run(W, X, y, a, lam, mse, tanh_act, eta, noise):
    """Advance W in place by noise.shape[0] LMC steps.

    Each step: W <- W - eta * grad(W) + sqrt(2) * noise[k], where eta is
    the drift coefficient 2h/s and noise[k] ~ N(0, h) per entry.
    """
    for k in range(noise.shape[0]):
        G = gradient(W, X, y, a, lam, mse, tanh_act)
        W -= eta * G
        W += _SQRT2 * noise[k]
