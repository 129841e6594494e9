"""Compare the compiled kernels against the pure-numpy fallback.

Usage: python3 benchmarks/bench_backends.py [steps]
Reports steps/s for the chain loop and calls/s for loss and gradient,
and checks that both backends agree numerically.
"""

import sys
import time

import numpy as np

from lmcnet import backend
from lmcnet.engine import chain_rng


def make_inputs(p=16, d=1, n=200, seed=0):
    rng = chain_rng(seed, 0)
    W = rng.normal(0.0, 0.25, size=(p, d))
    X = rng.uniform(-0.5, 0.5, size=(n, d))
    y = 2.0 * np.sin(np.pi * X[:, 0]) + 0.1 * rng.normal(size=n)
    a = np.full(p, 2.0 / np.sqrt(p))
    return (np.ascontiguousarray(W), np.ascontiguousarray(X),
            np.ascontiguousarray(y), np.ascontiguousarray(a))


def bench_one(impl, name, steps):
    W, X, y, a = make_inputs()
    args = (X, y, a, 2.1, True, True)

    t0 = time.perf_counter()
    for _ in range(200):
        impl.loss_value(W, *args)
    t_loss = (time.perf_counter() - t0) / 200

    t0 = time.perf_counter()
    for _ in range(200):
        impl.gradient(W, *args)
    t_grad = (time.perf_counter() - t0) / 200

    rng = chain_rng(1, 0)
    noise = rng.normal(0.0, 1e-3, size=(steps, *W.shape))
    Wc = W.copy()
    t0 = time.perf_counter()
    impl.chain_run(Wc, X, y, a, 2.1, True, True, 1e-3, noise)
    t_chain = time.perf_counter() - t0

    print(f"{name:8s}  loss {1 / t_loss:10.0f}/s  "
          f"grad {1 / t_grad:10.0f}/s  chain {steps / t_chain:10.0f} steps/s")
    return Wc


def main():
    steps = int(sys.argv[1]) if len(sys.argv) > 1 else 20000
    if backend.compiled_impl is None:
        print("compiled backend unavailable; benchmarking fallback only")
        bench_one(backend.python_impl, "python", steps)
        return
    Wc = bench_one(backend.compiled_impl, "cython", steps)
    Wp = bench_one(backend.python_impl, "python", steps)
    err = float(np.max(np.abs(Wc - Wp)))
    print(f"max |difference| after {steps} identical steps: {err:.3e}")


if __name__ == "__main__":
    main()
