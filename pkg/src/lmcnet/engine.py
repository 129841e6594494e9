"""LMC iteration, continuous-time interpolation, and an AdamW baseline.

Chains are advanced by the backend kernels in blocks; each chain owns a
counter-based RNG derived from (seed, chain id), so results do not
depend on how chains are scheduled across threads.
"""

from __future__ import annotations

import csv
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import backend, theory
from .activations import ActivationSpec
from .problem import ProblemSpec, check_weights

_SQRT2 = math.sqrt(2.0)
_MAX_NOISE_BLOCK = 8192


@dataclass(frozen=True)
class LmcConfig:
    h: float
    s: float
    n_steps: int
    seed: int = 0
    init: str = "zero"          # "zero" | "gaussian"
    init_variance: float = 0.0  # per-entry variance for gaussian init
    record_stride: int = 1
    snapshots: bool = False

    def __post_init__(self):
        if self.h <= 0 or self.s <= 0:
            raise ValueError("h and s must be positive")
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        if self.init not in ("zero", "gaussian"):
            raise ValueError("init must be 'zero' or 'gaussian'")
        if self.init_variance < 0:
            raise ValueError("init_variance must be >= 0")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")


@dataclass(frozen=True)
class AdamWConfig:
    lr: float
    n_steps: int
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps_adam: float = 1e-8
    weight_decay: float = 0.0
    batch_size: int = 16
    init: str = "zero"
    init_variance: float = 0.0
    record_stride: int = 1

    def __post_init__(self):
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("beta1, beta2 must lie in [0, 1)")
        if self.n_steps < 1 or self.batch_size < 1:
            raise ValueError("n_steps and batch_size must be >= 1")


@dataclass
class Trajectory:
    """Recorded iterates of one chain."""

    steps: np.ndarray
    times: np.ndarray
    train_loss: np.ndarray
    frob_norm_sq: np.ndarray
    test_loss: np.ndarray | None = None
    snapshots: np.ndarray | None = None  # (records, p, d) when requested
    final_W: np.ndarray | None = None
    chain_id: int = 0

    def to_csv(self, path) -> None:
        """CSV with columns step, time, train_loss, test_loss, frob_norm_sq."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "time", "train_loss", "test_loss",
                             "frob_norm_sq"])
            for i, k in enumerate(self.steps):
                test = ("" if self.test_loss is None
                        else repr(float(self.test_loss[i])))
                writer.writerow([int(k), repr(float(self.times[i])),
                                 repr(float(self.train_loss[i])), test,
                                 repr(float(self.frob_norm_sq[i]))])


def chain_rng(seed: int, chain_id: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(chain_id,))
    return np.random.Generator(np.random.Philox(ss))


def init_weights(p: int, d: int, init: str, seed: int,
                 variance: float = 0.0,
                 chain_id: int = 0) -> np.ndarray:
    """Zero or i.i.d. gaussian initialization; variance 1/p is the
    width-scaled preset used by the experiments."""
    if init == "zero":
        return np.zeros((p, d))
    if init == "gaussian":
        rng = chain_rng(seed, chain_id)
        return rng.normal(0.0, math.sqrt(variance), size=(p, d))
    raise ValueError(f"unknown init {init!r}")


def lmc_step(spec: ProblemSpec, act: ActivationSpec, W: np.ndarray,
             h: float, s: float, noise: np.ndarray) -> np.ndarray:
    """One update W - (2h/s) grad(W) + sqrt(2) * noise.

    The caller supplies noise with i.i.d. N(0, h) entries.
    """
    from .problem import gradient

    W = check_weights(spec, W)
    out = W - (2.0 * h / s) * gradient(spec, act, W) + _SQRT2 * noise
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("non-finite weights after LMC step")
    return out


def interpolate(W_kh: np.ndarray, grad_at_kh: np.ndarray, s: float,
                t_offset: float, h: float,
                brownian_increment: np.ndarray) -> np.ndarray:
    """Continuous-time interpolation within one step interval.

    W_t = W_kh - (2 t_offset / s) grad(W_kh) + sqrt(2) * increment, with
    0 <= t_offset <= h and increment ~ N(0, t_offset) per entry.
    """
    if not 0.0 <= t_offset <= h:
        raise ValueError(f"t_offset={t_offset} outside [0, {h}]")
    return W_kh - (2.0 * t_offset / s) * grad_at_kh + _SQRT2 * brownian_increment


def step_size_warning(spec: ProblemSpec, act: ActivationSpec, h: float,
                      s: float) -> None:
    """Warn when 2h/s is outside the provably stable region."""
    if spec.lam <= 0:
        return
    m, _ = theory.dissipativity(spec, act)
    beta = theory.beta_bound(spec, act)
    limit = min(1.0, m / (4.0 * beta ** 2))
    if 2.0 * h / s >= limit:
        warnings.warn(
            f"2h/s = {2 * h / s:.3g} >= {limit:.3g}; outside the region "
            "where the second-moment bound is guaranteed", RuntimeWarning)


def _record_points(n_steps: int, stride: int) -> list[int]:
    points = list(range(0, n_steps + 1, stride))
    if points[-1] != n_steps:
        points.append(n_steps)
    return points


def run_chain(spec: ProblemSpec, act: ActivationSpec, cfg: LmcConfig,
              test_set: tuple[np.ndarray, np.ndarray] | None = None,
              chain_id: int = 0,
              warn_step_size: bool = True) -> Trajectory:
    """Run one LMC chain; deterministic given (cfg, chain_id)."""
    from .problem import data_term, empirical_loss

    if warn_step_size:
        step_size_warning(spec, act, cfg.h, cfg.s)

    rng = chain_rng(cfg.seed, chain_id)
    if cfg.init == "gaussian":
        W = rng.normal(0.0, math.sqrt(cfg.init_variance),
                       size=(spec.p, spec.d))
    else:
        W = np.zeros((spec.p, spec.d))

    eta = 2.0 * cfg.h / cfg.s
    sigma_step = math.sqrt(cfg.h)
    points = _record_points(cfg.n_steps, cfg.record_stride)

    steps, times, train, test, norms, snaps = [], [], [], [], [], []

    def record(k: int) -> None:
        loss = empirical_loss(spec, act, W)
        if not math.isfinite(loss):
            raise FloatingPointError(f"non-finite loss at step {k}")
        steps.append(k)
        times.append(k * cfg.h)
        train.append(loss)
        norms.append(float(np.sum(W * W)))
        if test_set is not None:
            tl = backend.loss_value(
                np.ascontiguousarray(W), test_set[0], test_set[1],
                spec.a, spec.lam, spec.is_mse, act.is_tanh)
            test.append(tl)
        if cfg.snapshots:
            snaps.append(W.copy())

    record(0)
    done = 0
    for target in points[1:]:
        while done < target:
            block = min(target - done, _MAX_NOISE_BLOCK)
            noise = rng.normal(0.0, sigma_step,
                               size=(block, spec.p, spec.d))
            backend.chain_run(W, spec.X, spec.y, spec.a, spec.lam,
                              spec.is_mse, act.is_tanh, eta, noise)
            done += block
            if not np.all(np.isfinite(W)):
                raise FloatingPointError(
                    f"chain diverged by step {done} (chain {chain_id})")
        record(done)

    return Trajectory(
        steps=np.asarray(steps, dtype=np.int64),
        times=np.asarray(times),
        train_loss=np.asarray(train),
        frob_norm_sq=np.asarray(norms),
        test_loss=np.asarray(test) if test_set is not None else None,
        snapshots=np.asarray(snaps) if cfg.snapshots else None,
        final_W=W,
        chain_id=chain_id,
    )


def run_chains(spec: ProblemSpec, act: ActivationSpec, cfg: LmcConfig,
               n_chains: int,
               test_set: tuple[np.ndarray, np.ndarray] | None = None,
               threads: int = 1) -> list[Trajectory]:
    """Run independent chains; identical output for any thread count."""
    step_size_warning(spec, act, cfg.h, cfg.s)

    def one(cid: int) -> Trajectory:
        return run_chain(spec, act, cfg, test_set=test_set, chain_id=cid,
                         warn_step_size=False)

    if threads <= 1:
        return [one(cid) for cid in range(n_chains)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, range(n_chains)))


def run_adamw(spec: ProblemSpec, act: ActivationSpec, cfg: AdamWConfig,
              test_set: tuple[np.ndarray, np.ndarray] | None = None
              ) -> Trajectory:
    """AdamW on the unregularized data term with decoupled decay.

    The regularization enters only through weight_decay, mirroring how
    lam enters the LMC runs it is compared against.
    """
    from .problem import empirical_loss

    rng = chain_rng(cfg.seed, 0)
    if cfg.init == "gaussian":
        W = rng.normal(0.0, math.sqrt(cfg.init_variance),
                       size=(spec.p, spec.d))
    else:
        W = np.zeros((spec.p, spec.d))

    if cfg.batch_size > spec.n:
        raise ValueError("batch_size exceeds dataset size")

    m = np.zeros_like(W)
    v = np.zeros_like(W)
    points = _record_points(cfg.n_steps, cfg.record_stride)

    steps, times, train, test, norms = [], [], [], [], []

    def record(k: int) -> None:
        loss = empirical_loss(spec, act, W)
        if not math.isfinite(loss):
            raise FloatingPointError(f"non-finite loss at step {k}")
        steps.append(k)
        times.append(float(k))
        train.append(loss)
        norms.append(float(np.sum(W * W)))
        if test_set is not None:
            tl = backend.loss_value(
                np.ascontiguousarray(W), test_set[0], test_set[1],
                spec.a, spec.lam, spec.is_mse, act.is_tanh)
            test.append(tl)

    record(0)
    next_point = 1
    for t in range(1, cfg.n_steps + 1):
        idx = rng.choice(spec.n, size=cfg.batch_size, replace=False)
        Xb = np.ascontiguousarray(spec.X[idx])
        yb = np.ascontiguousarray(spec.y[idx])
        g = backend.gradient(W, Xb, yb, spec.a, 0.0, spec.is_mse,
                             act.is_tanh)
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g
        m_hat = m / (1.0 - cfg.beta1 ** t)
        v_hat = v / (1.0 - cfg.beta2 ** t)
        W -= cfg.lr * (m_hat / (np.sqrt(v_hat) + cfg.eps_adam)
                       + cfg.weight_decay * W)
        if not np.all(np.isfinite(W)):
            raise FloatingPointError(f"AdamW diverged at step {t}")
        if next_point < len(points) and t == points[next_point]:
            record(t)
            next_point += 1

    return Trajectory(
        steps=np.asarray(steps, dtype=np.int64),
        times=np.asarray(times),
        train_loss=np.asarray(train),
        frob_norm_sq=np.asarray(norms),
        test_loss=np.asarray(test) if test_set is not None else None,
        final_W=W,
    )
