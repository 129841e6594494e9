"""Bounded smooth activations and the constants attached to them.

Each activation carries the scalars that every downstream bound is built
from: the sup of |sigma|, the Lipschitz constants of sigma and sigma',
and the sups of |sigma'| and |sigma''|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# sup |tanh''| = 4 / (3 sqrt(3)), attained at z = atanh(1/sqrt(3));
# verified by grid maximization in the test suite.
_TANH_M2 = 4.0 / (3.0 * math.sqrt(3.0))
# sup |sigmoid''| = 1 / (6 sqrt(3))
_SIGMOID_M2 = 1.0 / (6.0 * math.sqrt(3.0))

# beyond this |z| tanh and the logistic factors are flat to 1e-15
SATURATION_CUTOFF = 40.0


@dataclass(frozen=True)
class ActivationSpec:
    """An activation function together with its analytic constants.

    Attributes:
        kind: "tanh" or "sigmoid".
        B_sigma: sup |sigma|.
        L: Lipschitz constant of sigma.
        M_D: sup |sigma'|.
        M_D_prime: sup |sigma''|.
        L_sigma_prime: Lipschitz constant of sigma'.
        c: sigma(0); broadcast to a constant length-p vector where needed.
    """

    kind: str
    B_sigma: float
    L: float
    M_D: float
    M_D_prime: float
    L_sigma_prime: float
    c: float

    def __post_init__(self):
        if self.kind not in ("tanh", "sigmoid"):
            raise ValueError(f"unknown activation kind {self.kind!r}")
        for name in ("B_sigma", "L", "M_D", "M_D_prime", "L_sigma_prime"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")

    @property
    def is_tanh(self) -> bool:
        return self.kind == "tanh"

    def sigma(self, z):
        z = np.asarray(z, dtype=np.float64)
        if self.is_tanh:
            return np.tanh(z)
        # numerically stable logistic
        out = np.empty_like(z)
        pos = z >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
        ez = np.exp(z[~pos])
        out[~pos] = ez / (1.0 + ez)
        return out

    def dsigma(self, z):
        s = self.sigma(z)
        if self.is_tanh:
            return 1.0 - s * s
        return s * (1.0 - s)

    def d2sigma(self, z):
        s = self.sigma(z)
        if self.is_tanh:
            return -2.0 * s * (1.0 - s * s)
        return s * (1.0 - s) * (1.0 - 2.0 * s)


TANH = ActivationSpec(
    kind="tanh",
    B_sigma=1.0,
    L=1.0,
    M_D=1.0,
    M_D_prime=_TANH_M2,
    L_sigma_prime=_TANH_M2,
    c=0.0,
)

SIGMOID = ActivationSpec(
    kind="sigmoid",
    B_sigma=1.0,
    L=0.25,
    M_D=0.25,
    M_D_prime=_SIGMOID_M2,
    L_sigma_prime=_SIGMOID_M2,
    c=0.5,
)

_BY_NAME = {"tanh": TANH, "sigmoid": SIGMOID}


def get_activation(name: str) -> ActivationSpec:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise ValueError(f"unknown activation {name!r}") from None
