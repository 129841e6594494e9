"""Empirical probes for every assumption the theory rests on:
gradient correctness, smoothness and dissipativity bounds, the
coercivity gauge of the potential, iterate second moments, and a crude
1D Poincare-constant estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .activations import ActivationSpec
from .problem import ProblemSpec, empirical_loss, gradient
from .engine import Trajectory, chain_rng
from .gibbs import GridDensity
from . import theory

PASS_SLACK = 1e-9  # absolute slack separating violations from float noise


@dataclass
class ProbeReport:
    name: str
    samples: int
    worst_margin: float  # bound minus observed, signed
    passed: bool
    details: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["worst_margin"] = float(out["worst_margin"])
        out["passed"] = bool(out["passed"])
        return out


def _fd_gradient(spec: ProblemSpec, act: ActivationSpec, W: np.ndarray,
                 step: float) -> np.ndarray:
    """5-point central differences of the empirical loss."""
    out = np.empty_like(W)
    for idx in np.ndindex(W.shape):
        delta = np.zeros_like(W)
        delta[idx] = step
        fm2 = empirical_loss(spec, act, W - 2 * delta)
        fm1 = empirical_loss(spec, act, W - delta)
        fp1 = empirical_loss(spec, act, W + delta)
        fp2 = empirical_loss(spec, act, W + 2 * delta)
        out[idx] = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * step)
    return out


def grad_check(spec: ProblemSpec, act: ActivationSpec, trials: int,
               fd_step: float = 1e-5, tol: float = 1e-5,
               radius: float = 5.0, seed: int = 0) -> ProbeReport:
    """Analytic gradient vs finite differences over random weights."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = chain_rng(seed, 0)
    worst = 0.0
    for _ in range(trials):
        W = rng.uniform(-radius, radius, size=(spec.p, spec.d))
        g = gradient(spec, act, W)
        fd = _fd_gradient(spec, act, W, fd_step)
        scale = np.maximum(np.abs(fd), 0.01 * np.abs(fd).max() + 1e-10)
        worst = max(worst, float(np.max(np.abs(g - fd) / scale)))
    margin = tol - worst
    return ProbeReport(
        name="grad_check", samples=trials, worst_margin=margin,
        passed=margin >= 0.0,
        details=[f"max relative error {worst:.3e} (tolerance {tol:g})"])


def lipschitz_probe(spec: ProblemSpec, act: ActivationSpec, pairs: int,
                    seed: int = 0, bound: float | None = None,
                    far_radius: float = 50.0) -> ProbeReport:
    """Gradient-difference ratios vs the smoothness bound.

    Mixes local perturbations (distance 1e-3) with far pairs, since the
    supremum ratio can be approached in either regime.
    """
    if pairs < 1:
        raise ValueError("pairs must be >= 1")
    if bound is None:
        bound = theory.beta_bound(spec, act)
    rng = chain_rng(seed, 1)
    shape = (spec.p, spec.d)
    worst = 0.0
    for k in range(pairs):
        if k % 2 == 0:
            W = rng.uniform(-far_radius, far_radius, size=shape)
            direction = rng.normal(size=shape)
            V = W + 1e-3 * direction / np.linalg.norm(direction)
        else:
            W = rng.uniform(-far_radius, far_radius, size=shape)
            V = rng.uniform(-far_radius, far_radius, size=shape)
        num = np.linalg.norm(gradient(spec, act, W) - gradient(spec, act, V))
        den = np.linalg.norm(W - V)
        if den > 0:
            worst = max(worst, float(num / den))
    margin = bound - worst
    return ProbeReport(
        name="lipschitz_probe", samples=pairs, worst_margin=margin,
        passed=margin >= -PASS_SLACK,
        details=[f"max ratio {worst:.6g} vs bound {bound:.6g}"])


def dissipativity_probe(spec: ProblemSpec, act: ActivationSpec,
                        samples: int, seed: int = 0,
                        m: float | None = None,
                        b: float | None = None) -> ProbeReport:
    """<W, grad L_i(W)> >= m ||W||^2 - b for every per-point loss."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if m is None or b is None:
        m, b = theory.dissipativity(spec, act)
    rng = chain_rng(seed, 2)
    r_max = 100.0 * math.sqrt(b / m) if b > 0 else 100.0
    shape = (spec.p, spec.d)
    worst = math.inf
    violations = 0
    for _ in range(samples):
        direction = rng.normal(size=shape)
        direction /= np.linalg.norm(direction)
        radius = 10.0 ** rng.uniform(-2.0, math.log10(max(r_max, 1.0)))
        W = radius * direction
        i = int(rng.integers(spec.n))
        g = gradient(spec.restrict_to(i), act, W)
        lhs = float(np.sum(W * g))
        margin = lhs - (m * float(np.sum(W * W)) - b)
        worst = min(worst, margin)
        if margin < -PASS_SLACK:
            violations += 1
    return ProbeReport(
        name="dissipativity_probe", samples=samples, worst_margin=worst,
        passed=violations == 0,
        details=[f"{violations} violations; worst margin {worst:.3e} "
                 f"(m={m:.6g}, b={b:.6g})"])


def laplacian(spec: ProblemSpec, act: ActivationSpec, W: np.ndarray,
              rng: np.random.Generator | None = None,
              probes: int = 64) -> float:
    """Trace of the loss Hessian: exact coordinate sweep of gradient
    differences for dimension <= 64, Hutchinson above."""
    pd = spec.p * spec.d
    delta = 1e-4 * max(1.0, float(np.abs(W).max()))
    if pd <= 64:
        total = 0.0
        for idx in np.ndindex(W.shape):
            e = np.zeros_like(W)
            e[idx] = delta
            gp = gradient(spec, act, W + e)
            gm = gradient(spec, act, W - e)
            total += float(gp[idx] - gm[idx]) / (2 * delta)
        return total
    if rng is None:
        rng = chain_rng(0, 3)
    total = 0.0
    for _ in range(probes):
        v = rng.choice([-1.0, 1.0], size=W.shape)
        gp = gradient(spec, act, W + delta * v)
        gm = gradient(spec, act, W - delta * v)
        total += float(np.sum(v * (gp - gm))) / (2 * delta)
    return total / probes


def villani_gauge(spec: ProblemSpec, act: ActivationSpec, s: float,
                  W: np.ndarray,
                  rng: np.random.Generator | None = None) -> float:
    """-Laplacian(L)(W) + (1/s) ||grad L(W)||^2; diverging at infinity is
    the coercivity condition that yields the Poincare inequality."""
    g = gradient(spec, act, W)
    return -laplacian(spec, act, W, rng=rng) \
        + float(np.sum(g * g)) / s


def villani_probe(spec: ProblemSpec, act: ActivationSpec, s: float,
                  radii: tuple[float, ...] = (1.0, 10.0, 100.0, 1000.0),
                  directions: int = 8, seed: int = 0) -> ProbeReport:
    """Checks that the coercivity gauge grows along rays: at the two
    largest radii it must be positive and exceed its value at the
    smallest radius, for every sampled direction."""
    if s <= 0:
        raise ValueError("s must be positive")
    radii = tuple(sorted(radii))
    if len(radii) < 2:
        raise ValueError("need at least two radii")
    rng = chain_rng(seed, 4)
    shape = (spec.p, spec.d)
    worst = math.inf
    details = []
    for j in range(directions):
        u = rng.normal(size=shape)
        u /= np.linalg.norm(u)
        values = [villani_gauge(spec, act, s, r * u, rng=rng)
                  for r in radii]
        g_small = values[0]
        for g_large in values[-2:]:
            worst = min(worst, g_large - g_small, g_large)
        details.append("direction %d: G=%s" % (
            j, ", ".join(f"{v:.4g}" for v in values)))
    return ProbeReport(
        name="villani_probe", samples=directions * len(radii),
        worst_margin=worst, passed=worst >= -PASS_SLACK, details=details)


def empirical_log_moment(init_samples: np.ndarray) -> float:
    """kappa estimate log E[exp(||W||^2)] with a divergence check:
    raises if the estimate still grows with the sample size."""
    flat = np.atleast_2d(init_samples).reshape(len(init_samples), -1)
    sq = np.sum(flat * flat, axis=1)
    if len(sq) < 10:
        return float(np.log(np.mean(np.exp(sq))))
    half = float(np.log(np.mean(np.exp(sq[: len(sq) // 2]))))
    full = float(np.log(np.mean(np.exp(sq))))
    if full > half + 0.5 * abs(half) + 0.5:
        raise FloatingPointError(
            "empirical log-moment grows with sample size; "
            "initial distribution is not 'nice'")
    return full


def second_moment_probe(trajectories: list[Trajectory],
                        constants: theory.TheoryConstants,
                        p: int, d: int, s: float, h: float,
                        init_samples: np.ndarray) -> ProbeReport:
    """Ensemble-mean ||W||^2 along the chains vs the uniform-in-time
    second-moment bound."""
    m, b, B = constants.m, constants.b, constants.B
    step_limit = min(1.0, m / (4.0 * constants.beta ** 2))
    if 2.0 * h / s >= step_limit:
        return ProbeReport(
            name="second_moment_probe", samples=0, worst_margin=-math.inf,
            passed=False,
            details=[f"precondition failed: 2h/s = {2 * h / s:.3g} >= "
                     f"{step_limit:.3g}"])
    try:
        kappa_hat = empirical_log_moment(init_samples)
    except FloatingPointError as exc:
        return ProbeReport(
            name="second_moment_probe", samples=0, worst_margin=-math.inf,
            passed=False, details=[f"precondition failed: {exc}"])

    bound = kappa_hat + 2.0 * max(1.0, 1.0 / m) * (
        b + 2.0 * B ** 2 + p * d * s / 2.0)
    norms = np.stack([tr.frob_norm_sq for tr in trajectories])
    ensemble_mean = norms.mean(axis=0)
    worst = float(bound - ensemble_mean.max())
    return ProbeReport(
        name="second_moment_probe",
        samples=norms.size, worst_margin=worst, passed=worst >= 0.0,
        details=[f"bound {bound:.6g}, max ensemble mean "
                 f"{ensemble_mean.max():.6g} (kappa_hat={kappa_hat:.3g})"])


def poincare_estimate_1d(density: GridDensity, family_size: int) -> float:
    """Lower bound on the Poincare constant of a 1D density.

    Maximizes Var[h] / E[h'^2] over a nested family of test functions:
    the constant, then monomials and Fourier modes of increasing order.
    """
    if density.grid.ndim != 1:
        raise ValueError("poincare_estimate_1d needs a 1D density")
    if family_size < 1:
        raise ValueError("family_size must be >= 1")
    x = density.grid.centers(0)
    w = density.mass
    lo, hi, _ = density.grid.axes[0]
    span = hi - lo
    mean_x = float(np.sum(w * x))

    funcs = [np.ones_like(x)]
    for k in range(1, family_size):
        funcs.append((x - mean_x) ** k)
        funcs.append(np.cos(k * np.pi * (x - lo) / span))
        funcs.append(np.sin(k * np.pi * (x - lo) / span))

    best = 0.0
    for hvals in funcs:
        dh = np.gradient(hvals, x)
        energy = float(np.sum(w * dh * dh))
        if energy <= 0:
            continue
        mean_h = float(np.sum(w * hvals))
        var = float(np.sum(w * (hvals - mean_h) ** 2))
        best = max(best, var / energy)
    return best


def run_all_probes(spec: ProblemSpec, act: ActivationSpec, s: float,
                   seed: int = 0, grad_trials: int = 50,
                   pairs: int = 2000, samples: int = 2000
                   ) -> list[ProbeReport]:
    """Default probe battery used by the CLI `diagnose` subcommand."""
    return [
        grad_check(spec, act, grad_trials, seed=seed),
        lipschitz_probe(spec, act, pairs, seed=seed),
        dissipativity_probe(spec, act, samples, seed=seed),
        villani_probe(spec, act, s, seed=seed),
    ]
