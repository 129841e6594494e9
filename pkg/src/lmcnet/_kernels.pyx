# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: loss, gradient and the LMC chain loop.

API mirrors lmcnet._kernels_py. Shapes: W (p, d), X (n, d), y (n,),
a (p,), noise (steps, p, d).
"""

import numpy as np

cimport cython
from libc.math cimport tanh, exp, log1p, fabs, sqrt


cdef inline double _sig(double z) noexcept nogil:
    cdef double e
    if z >= 0.0:
        return 1.0 / (1.0 + exp(-z))
    e = exp(z)
    return e / (1.0 + e)


cdef inline double _softplus(double u) noexcept nogil:
    # log(1 + e^u) without overflow
    if u > 0.0:
        return u + log1p(exp(-u))
    return log1p(exp(u))


cdef double _loss(double[:, ::1] W, double[:, ::1] X, double[::1] y,
                  double[::1] a, double lam, bint mse,
                  bint tanh_act) noexcept nogil:
    cdef Py_ssize_t p = W.shape[0], d = W.shape[1], n = X.shape[0]
    cdef Py_ssize_t i, k, j
    cdef double f, z, acc = 0.0, reg = 0.0, r
    for i in range(n):
        f = 0.0
        for k in range(p):
            z = 0.0
            for j in range(d):
                z += W[k, j] * X[i, j]
            if tanh_act:
                f += a[k] * tanh(z)
            else:
                f += a[k] * _sig(z)
        if mse:
            r = y[i] - f
            acc += 0.5 * r * r
        else:
            acc += _softplus(-y[i] * f)
    for k in range(p):
        for j in range(d):
            reg += W[k, j] * W[k, j]
    return acc / n + 0.5 * lam * reg


cdef void _grad(double[:, ::1] W, double[:, ::1] X, double[::1] y,
                double[::1] a, double lam, bint mse, bint tanh_act,
                double[:, ::1] out, double[::1] sbuf) noexcept nogil:
    cdef Py_ssize_t p = W.shape[0], d = W.shape[1], n = X.shape[0]
    cdef Py_ssize_t i, k, j
    cdef double f, z, r, coef, s
    for k in range(p):
        for j in range(d):
            out[k, j] = lam * W[k, j]
    for i in range(n):
        f = 0.0
        for k in range(p):
            z = 0.0
            for j in range(d):
                z += W[k, j] * X[i, j]
            if tanh_act:
                s = tanh(z)
            else:
                s = _sig(z)
            sbuf[k] = s
            f += a[k] * s
        if mse:
            r = (f - y[i]) / n
        else:
            r = -y[i] * _sig(-y[i] * f) / n
        for k in range(p):
            s = sbuf[k]
            if tanh_act:
                coef = a[k] * (1.0 - s * s) * r
            else:
                coef = a[k] * s * (1.0 - s) * r
            for j in range(d):
                out[k, j] += coef * X[i, j]


def loss_value(W, X, y, a, double lam, bint mse, bint tanh_act):
    cdef double[:, ::1] Wv = W
    cdef double[:, ::1] Xv = X
    cdef double[::1] yv = y
    cdef double[::1] av = a
    cdef double v
    with nogil:
        v = _loss(Wv, Xv, yv, av, lam, mse, tanh_act)
    return v


def gradient(W, X, y, a, double lam, bint mse, bint tanh_act):
    out = np.empty_like(W)
    sbuf = np.empty(W.shape[0], dtype=np.float64)
    cdef double[:, ::1] Wv = W
    cdef double[:, ::1] Xv = X
    cdef double[::1] yv = y
    cdef double[::1] av = a
    cdef double[:, ::1] outv = out
    cdef double[::1] sv = sbuf
    with nogil:
        _grad(Wv, Xv, yv, av, lam, mse, tanh_act, outv, sv)
    return out


def chain_run(W, X, y, a, double lam, bint mse, bint tanh_act,
              double eta, noise):
    """Advance W in place by noise.shape[0] LMC steps.

    Each step: W <- W - eta * grad(W) + sqrt(2) * noise[k], where eta is
    the drift coefficient 2h/s and noise[k] ~ N(0, h) per entry.
    """
    g = np.empty_like(W)
    sbuf = np.empty(W.shape[0], dtype=np.float64)
    cdef double[:, ::1] Wv = W
    cdef double[:, ::1] Xv = X
    cdef double[::1] yv = y
    cdef double[::1] av = a
    cdef double[:, ::1] gv = g
    cdef double[::1] sv = sbuf
    cdef double[:, :, ::1] nv = noise
    cdef Py_ssize_t steps = noise.shape[0]
    cdef Py_ssize_t p = W.shape[0], d = W.shape[1]
    cdef Py_ssize_t k, r, j
    cdef double sqrt2 = sqrt(2.0)
    with nogil:
        for k in range(steps):
            _grad(Wv, Xv, yv, av, lam, mse, tanh_act, gv, sv)
            for r in range(p):
                for j in range(d):
                    Wv[r, j] += -eta * gv[r, j] + sqrt2 * nv[k, r, j]
