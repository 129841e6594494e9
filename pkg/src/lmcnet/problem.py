"""Depth-2 network, regularized empirical losses and closed-form gradients.

The network is x -> <a, sigma(W x)> with a fixed outer layer a and a
trainable p x d matrix W. Losses are the data-term average plus
(lam/2) ||W||_F^2; heavy lifting is delegated to the compiled kernels
when available (see lmcnet.backend).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from .activations import ActivationSpec
from . import backend

LOSS_KINDS = ("mse", "bce")


@dataclass(frozen=True)
class ProblemSpec:
    """Network shape, dataset with bounds, loss kind and regularization.

    B_x / B_y may be omitted, in which case they are computed from the
    data; supplied values must dominate the data.
    """

    a: np.ndarray
    X: np.ndarray
    y: np.ndarray
    loss_kind: str
    lam: float
    B_x: float | None = None
    B_y: float | None = None

    def __post_init__(self):
        a = np.ascontiguousarray(np.atleast_1d(self.a), dtype=np.float64)
        X = np.ascontiguousarray(np.atleast_2d(self.X), dtype=np.float64)
        y = np.ascontiguousarray(np.atleast_1d(self.y), dtype=np.float64)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

        if self.loss_kind not in LOSS_KINDS:
            raise ValueError(f"loss_kind must be one of {LOSS_KINDS}")
        if self.lam < 0:
            raise ValueError("lam must be non-negative")
        if X.shape[0] == 0:
            raise ValueError("dataset must contain at least one point")
        if X.shape[0] != y.shape[0]:
            raise ValueError("X and y length mismatch")

        norms = np.linalg.norm(X, axis=1)
        data_bx = float(norms.max())
        if self.B_x is None:
            object.__setattr__(self, "B_x", data_bx)
        elif self.B_x < data_bx - 1e-12:
            raise ValueError(f"B_x={self.B_x} does not dominate the data "
                             f"(max ||x|| = {data_bx})")

        if self.loss_kind == "bce":
            if not np.all(np.isin(y, (-1.0, 1.0))):
                raise ValueError("BCE labels must be +/-1")
            object.__setattr__(self, "B_y", 0.0)
        else:
            data_by = float(np.abs(y).max())
            if self.B_y is None:
                object.__setattr__(self, "B_y", data_by)
            elif self.B_y < data_by - 1e-12:
                raise ValueError(f"B_y={self.B_y} does not dominate the data "
                                 f"(max |y| = {data_by})")

    @property
    def p(self) -> int:
        return self.a.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def is_mse(self) -> bool:
        return self.loss_kind == "mse"

    def with_lambda(self, lam: float) -> "ProblemSpec":
        return replace(self, lam=lam)

    def restrict_to(self, i: int) -> "ProblemSpec":
        """Spec holding only the i-th data point (same lam and bounds)."""
        return replace(self, X=self.X[i:i + 1], y=self.y[i:i + 1])


def check_weights(spec: ProblemSpec, W: np.ndarray) -> np.ndarray:
    W = np.ascontiguousarray(W, dtype=np.float64)
    if W.shape != (spec.p, spec.d):
        raise ValueError(f"W has shape {W.shape}, expected {(spec.p, spec.d)}")
    if not np.all(np.isfinite(W)):
        raise FloatingPointError("W contains non-finite entries")
    return W


def forward(x: np.ndarray, spec: ProblemSpec, act: ActivationSpec,
            W: np.ndarray) -> float:
    """<a, sigma(W x)> for a single input x."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != spec.d:
        raise ValueError(f"x has dimension {x.shape[0]}, expected {spec.d}")
    W = check_weights(spec, W)
    return float(spec.a @ act.sigma(W @ x))


def predict(spec: ProblemSpec, act: ActivationSpec, W: np.ndarray,
            X: np.ndarray | None = None) -> np.ndarray:
    """Network outputs for a batch of inputs (defaults to the spec's data)."""
    if X is None:
        X = spec.X
    W = check_weights(spec, W)
    return spec.a @ act.sigma(W @ np.asarray(X, dtype=np.float64).T)


def empirical_loss(spec: ProblemSpec, act: ActivationSpec,
                   W: np.ndarray) -> float:
    """(1/n) sum of per-point losses plus (lam/2) ||W||_F^2."""
    W = check_weights(spec, W)
    return backend.loss_value(W, spec.X, spec.y, spec.a, spec.lam,
                              spec.is_mse, act.is_tanh)


def gradient(spec: ProblemSpec, act: ActivationSpec,
             W: np.ndarray) -> np.ndarray:
    """Closed-form gradient of empirical_loss with respect to W."""
    W = check_weights(spec, W)
    return backend.gradient(W, spec.X, spec.y, spec.a, spec.lam,
                            spec.is_mse, act.is_tanh)


def data_term(spec: ProblemSpec, act: ActivationSpec, W: np.ndarray,
              X: np.ndarray | None = None,
              y: np.ndarray | None = None) -> float:
    """Unregularized loss average, optionally on a held-out (X, y)."""
    if X is None:
        X, y = spec.X, spec.y
    X = np.ascontiguousarray(np.atleast_2d(X), dtype=np.float64)
    y = np.ascontiguousarray(np.atleast_1d(y), dtype=np.float64)
    W = check_weights(spec, W)
    return backend.loss_value(W, X, y, spec.a, 0.0, spec.is_mse, act.is_tanh)


def save_dataset(path, X: np.ndarray, y: np.ndarray) -> None:
    """CSV with header x_0..x_{d-1}, y; one row per example."""
    X = np.atleast_2d(X)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x_{j}" for j in range(X.shape[1])] + ["y"])
        for xi, yi in zip(X, y):
            writer.writerow([repr(float(v)) for v in xi] + [repr(float(yi))])


def load_dataset(path) -> tuple[np.ndarray, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[-1] != "y" or not all(h.startswith("x_") for h in header[:-1]):
            raise ValueError(f"unexpected dataset header {header}")
        rows = [[float(v) for v in row] for row in reader]
    data = np.asarray(rows, dtype=np.float64)
    return data[:, :-1], data[:, -1]
