"""Closed-form constants of the regularized depth-2 losses.

Critical regularization thresholds, gradient-Lipschitz and Lipschitz
bounds, dissipativity constants, origin bounds and the Radon-Nikodym
bound, all as explicit functions of the problem and activation specs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from .activations import ActivationSpec
from .problem import ProblemSpec


@dataclass(frozen=True)
class TheoryConstants:
    """Derived scalars for one (problem, activation) pair.

    C_L is the Radon-Nikodym bound; it needs the temperature scale s and
    is None when s was not supplied.
    """

    lambda_c: float
    beta: float
    alpha: float
    m: float
    b: float
    A: float
    B: float
    C_L: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def critical_lambda(spec: ProblemSpec, act: ActivationSpec) -> float:
    """Regularization threshold above which the loss is a Villani function."""
    base = act.M_D * act.L * spec.B_x ** 2 * float(np.sum(spec.a ** 2))
    if spec.is_mse:
        return 2.0 * base
    return base / 2.0


def beta_bound(spec: ProblemSpec, act: ActivationSpec) -> float:
    """Upper bound on the gradient-Lipschitz constant of the loss."""
    p = spec.p
    sp = math.sqrt(p)
    na = float(np.linalg.norm(spec.a))
    Bx = spec.B_x
    if spec.is_mse:
        inner = (na * Bx * spec.B_y * act.L_sigma_prime
                 + sp * na ** 2 * act.M_D ** 2 * Bx ** 2
                 + p * na ** 2 * Bx ** 2 * act.M_D_prime * act.B_sigma)
    else:
        norm_c = sp * abs(act.c)  # ||c||_2 for the broadcast constant vector
        inner = (sp * na * act.M_D ** 2 * Bx / 4.0
                 + (2.0 + norm_c + na * act.B_sigma) / 4.0
                 * act.M_D_prime * Bx * p)
    return sp * (inner + spec.lam)


def alpha_lipschitz(spec: ProblemSpec, act: ActivationSpec) -> float:
    """Lipschitz constant of the unregularized per-point data term."""
    p = spec.p
    sp = math.sqrt(p)
    na = float(np.linalg.norm(spec.a))
    Bx = spec.B_x
    if spec.is_mse:
        return sp * (na * Bx * spec.B_y * act.M_D
                     + Bx * sp * na ** 2 * act.B_sigma * act.M_D)
    return sp * na * Bx * act.M_D * (sp / 2.0
                                     + sp * na * act.B_sigma * Bx / 4.0)


def dissipativity(spec: ProblemSpec, act: ActivationSpec) -> tuple[float, float]:
    """(m, b) with <W, grad L_i(W)> >= m ||W||^2 - b for every data point."""
    if spec.lam == 0:
        raise ValueError("dissipativity requires lam > 0")
    alpha = alpha_lipschitz(spec, act)
    return spec.lam / 2.0, alpha ** 2 / (2.0 * spec.lam)


def origin_bounds(spec: ProblemSpec, act: ActivationSpec) -> tuple[float, float]:
    """(A, B): bounds on |L_i(0)| and ||grad L_i(0)||."""
    p = spec.p
    sp = math.sqrt(p)
    na = float(np.linalg.norm(spec.a))
    ac = act.c * float(np.sum(spec.a))  # <a, c> with c broadcast
    if spec.is_mse:
        A = (spec.B_y + abs(ac)) ** 2 / 2.0
        B = sp * na * spec.B_x * act.M_D * (spec.B_y + abs(ac))
    else:
        A = float(np.logaddexp(0.0, ac))  # log(1 + e^<a,c>)
        logistic = 1.0 / (1.0 + math.exp(-ac)) if ac > -700 else 0.0
        B = sp * na * spec.B_x * act.M_D * logistic
    return A, B


def radon_nikodym_bound(spec: ProblemSpec, act: ActivationSpec,
                        n: int, s: float) -> float:
    """Bound on sup dmu/dmu' for Gibbs measures differing at one data point.

    The partition-function ratio K is not computable in closed form and
    is set to 1; the bound is meaningful as a relative-scale diagnostic.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if s <= 0:
        raise ValueError("s must be positive")
    a_max = float(np.max(np.abs(spec.a))) if spec.p else 0.0
    u = spec.p * a_max * act.B_sigma
    if spec.is_mse:
        gap = 0.5 * (spec.B_y + u) ** 2
    else:
        # log((1+e^u)/(1+e^-u)), stably
        gap = 0.5 * float(np.logaddexp(0.0, u) - np.logaddexp(0.0, -u))
    exponent = 2.0 / (s * n) * gap
    if exponent > 700.0:  # beyond double range; the bound is still valid
        return math.inf
    return math.exp(exponent)


def compute_constants(spec: ProblemSpec, act: ActivationSpec,
                      n: int | None = None,
                      s: float | None = None) -> TheoryConstants:
    """All derived scalars for a spec; C_L only when s is supplied."""
    m, b = dissipativity(spec, act)
    A, B = origin_bounds(spec, act)
    C_L = None
    if s is not None:
        C_L = radon_nikodym_bound(spec, act, n if n is not None else spec.n, s)
    return TheoryConstants(
        lambda_c=critical_lambda(spec, act),
        beta=beta_bound(spec, act),
        alpha=alpha_lipschitz(spec, act),
        m=m, b=b, A=A, B=B, C_L=C_L,
    )


def excess_risk_bound(constants: TheoryConstants, p: int, d: int, s: float,
                      n: int, eps: float, C_PI: float,
                      kappa0: float) -> float:
    """Bound on the expected excess population risk of the final iterate.

    Requires s <= min(2, m) and a Radon-Nikodym bound in `constants`.
    """
    m, b = constants.m, constants.b
    beta, B = constants.beta, constants.B
    if s > min(2.0, m):
        raise ValueError(f"s={s} violates the precondition s <= min(2, m)="
                         f"{min(2.0, m)}")
    if constants.C_L is None:
        raise ValueError("constants.C_L required (compute with s supplied)")
    if min(p, d, n) < 1 or eps < 0 or C_PI <= 0 or s <= 0:
        raise ValueError("inputs must be positive (eps >= 0)")

    c3 = (16.0 * math.sqrt(2.0)
          * (beta ** 2 * (b + s * p * d / 2.0) / m + B ** 2)
          * C_PI * math.sqrt(constants.C_L) / s)
    stability = c3 / n
    gibbs_gap = (p * d * s / 4.0
                 * math.log(math.e * beta / m * (2.0 * b / (s * p * d) + 1.0)))
    second_moment = kappa0 + 2.0 * max(1.0, 1.0 / m) * (
        b + 2.0 * B ** 2 + p * d * s / 2.0)
    transport = (beta * math.sqrt(second_moment) + B) * 2.0 * C_PI * eps
    return stability + gibbs_gap + transport


def tv_step_size_hint(K0: float, beta: float, p: int, d: int, N: int) -> float:
    """Step size for which the averaged-measure TV bound applies.

    K0 bounds the initial KL divergence to the Gibbs measure.
    """
    if min(K0, beta) <= 0 or min(p, d, N) < 1:
        raise ValueError("all inputs must be positive")
    return math.sqrt(K0) / (2.0 * beta * math.sqrt(p * d * N))


def tv_bound(C_PI: float, beta: float, p: int, d: int, K0: float,
             N: int) -> float:
    """Bound on ||avg measure - Gibbs||_TV^2 after N steps at the hinted h."""
    return 2.0 * C_PI * beta * math.sqrt(p * d * K0) / math.sqrt(N)
