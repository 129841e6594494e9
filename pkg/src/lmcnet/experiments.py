"""Desk-scale experiment harness: sine-regression data, width sweeps
with a learning-rate grid, label-noise sensitivity, and an AdamW
comparison. Emits CSV tables and SVG line plots.

The "learning rate" in the grid is the effective drift coefficient
2h/s of the LMC update, so h = lr * s / 2; this keeps the grid
meaningful across temperature scales.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, replace

import numpy as np

from . import theory
from .activations import TANH, ActivationSpec
from .engine import (AdamWConfig, LmcConfig, Trajectory, chain_rng,
                     run_adamw, run_chains)
from .problem import ProblemSpec
from .svgplot import line_plot

LR_GRID_DEFAULT = (1e-3, 5e-3, 1e-2, 5e-2, 1e-1, 5e-1)


@dataclass(frozen=True)
class ExperimentConfig:
    task: str = "regression"           # "regression" | "classification"
    widths: tuple[int, ...] = (16, 64, 256)
    lam: float | str = "auto"          # "auto" -> critical lambda + margin
    lam_margin: float = 0.1
    s: float = 1e-4
    lr_grid: tuple[float, ...] = LR_GRID_DEFAULT
    n_steps: int = 2000
    chains: int = 1
    noise_sigma: float = 0.0
    seed: int = 0
    optimizer: str = "lmc"             # "lmc" | "adamw"
    init: str = "gaussian-1/width"     # "zero" | "gaussian-1/width"
    out_dir: str = "results"
    n_train: int = 200
    n_test: int = 200
    record_stride: int = 10
    threads: int = 1

    def __post_init__(self):
        if self.task not in ("regression", "classification"):
            raise ValueError(f"unknown task {self.task!r}")
        if not self.widths or not self.lr_grid:
            raise ValueError("widths and lr_grid must be non-empty")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if self.optimizer not in ("lmc", "adamw"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.init not in ("zero", "gaussian-1/width"):
            raise ValueError(f"unknown init {self.init!r}")
        object.__setattr__(self, "widths", tuple(int(w) for w in self.widths))
        object.__setattr__(self, "lr_grid",
                           tuple(float(r) for r in self.lr_grid))


def generate_sine_data(n_train: int, n_test: int, noise_sigma: float,
                       seed: int) -> tuple[np.ndarray, np.ndarray,
                                           np.ndarray, np.ndarray]:
    """x uniform on [-1/2, 1/2], y = 2 sin(pi x) + noise_sigma * N(0,1).

    The noise draws are independent of noise_sigma's value, so runs with
    the same seed but different noise levels share the same underlying
    (x, z) pairs (common random numbers).
    """
    if min(n_train, n_test) < 1:
        raise ValueError("dataset sizes must be >= 1")
    rng = chain_rng(seed, 0)
    x_tr = rng.uniform(-0.5, 0.5, size=(n_train, 1))
    z_tr = rng.normal(size=n_train)
    x_te = rng.uniform(-0.5, 0.5, size=(n_test, 1))
    z_te = rng.normal(size=n_test)
    y_tr = 2.0 * np.sin(np.pi * x_tr[:, 0]) + noise_sigma * z_tr
    y_te = 2.0 * np.sin(np.pi * x_te[:, 0]) + noise_sigma * z_te
    return x_tr, y_tr, x_te, y_te


def fixed_outer_weights(p: int) -> np.ndarray:
    """Outer layer with ||a||_2 = 2 at every width (a_i = 2/sqrt(p))."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return np.full(p, 2.0 / math.sqrt(p))


def make_problem(cfg: ExperimentConfig, width: int, seed: int,
                 act: ActivationSpec = TANH
                 ) -> tuple[ProblemSpec, tuple[np.ndarray, np.ndarray]]:
    """Problem + held-out test set for one (config, width, seed) cell."""
    x_tr, y_tr, x_te, y_te = generate_sine_data(
        cfg.n_train, cfg.n_test, cfg.noise_sigma, seed)
    a = fixed_outer_weights(width)
    if cfg.task == "classification":
        y_tr = np.where(y_tr >= 0, 1.0, -1.0)
        y_te = np.where(y_te >= 0, 1.0, -1.0)
        spec = ProblemSpec(a=a, X=x_tr, y=y_tr, loss_kind="bce",
                           lam=0.0, B_x=0.5)
    else:
        spec = ProblemSpec(a=a, X=x_tr, y=y_tr, loss_kind="mse",
                           lam=0.0, B_x=0.5)
    lam = resolve_lambda(cfg, spec, act)
    return spec.with_lambda(lam), (np.ascontiguousarray(x_te),
                                   np.ascontiguousarray(y_te))


def resolve_lambda(cfg: ExperimentConfig, spec: ProblemSpec,
                   act: ActivationSpec = TANH) -> float:
    if cfg.lam == "auto":
        return theory.critical_lambda(spec, act) + cfg.lam_margin
    return float(cfg.lam)


def _lmc_config(cfg: ExperimentConfig, lr: float, width: int,
                seed: int) -> LmcConfig:
    init = "zero" if cfg.init == "zero" else "gaussian"
    return LmcConfig(
        h=lr * cfg.s / 2.0, s=cfg.s, n_steps=cfg.n_steps, seed=seed,
        init=init, init_variance=0.0 if init == "zero" else 1.0 / width,
        record_stride=cfg.record_stride)


def _run_lr_grid(cfg: ExperimentConfig, spec: ProblemSpec,
                 act: ActivationSpec, width: int, seed: int,
                 test_set) -> tuple[float | None, Trajectory | None, dict]:
    """Best learning rate by final train loss; diverging rates skipped."""
    best_lr, best_traj, best_loss = None, None, math.inf
    diverged = []
    for lr in cfg.lr_grid:
        try:
            trajs = run_chains(spec, act, _lmc_config(cfg, lr, width, seed),
                               cfg.chains, test_set=test_set,
                               threads=cfg.threads)
        except FloatingPointError:
            diverged.append(lr)
            continue
        final = float(np.mean([t.train_loss[-1] for t in trajs]))
        if final < best_loss:
            best_lr, best_traj, best_loss = lr, trajs[0], final
    return best_lr, best_traj, {"diverged_lrs": diverged}


@dataclass
class SweepRow:
    width: int
    best_lr: float | None
    final_train: float | None
    final_test: float | None
    initial_test: float | None
    diverged: bool


@dataclass
class SweepResult:
    rows: list[SweepRow]
    curves: dict[int, Trajectory]  # best-lr trajectory per width

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["width", "best_lr", "final_train",
                             "final_test", "initial_test", "diverged"])
            for r in self.rows:
                writer.writerow([
                    r.width,
                    "" if r.best_lr is None else repr(r.best_lr),
                    "" if r.final_train is None else repr(r.final_train),
                    "" if r.final_test is None else repr(r.final_test),
                    "" if r.initial_test is None else repr(r.initial_test),
                    int(r.diverged)])


def width_sweep(cfg: ExperimentConfig,
                act: ActivationSpec = TANH) -> SweepResult:
    """For each width: grid-search the rate, record the best chain."""
    rows, curves = [], {}
    for width in cfg.widths:
        spec, test_set = make_problem(cfg, width, cfg.seed, act)
        best_lr, traj, info = _run_lr_grid(
            cfg, spec, act, width, cfg.seed, test_set)
        if best_lr is None:
            rows.append(SweepRow(width, None, None, None, None, True))
            continue
        rows.append(SweepRow(
            width=width, best_lr=best_lr,
            final_train=float(traj.train_loss[-1]),
            final_test=float(traj.test_loss[-1]),
            initial_test=float(traj.test_loss[0]),
            diverged=bool(info["diverged_lrs"])))
        curves[width] = traj
    return SweepResult(rows=rows, curves=curves)


def noise_sweep(cfg: ExperimentConfig, sigmas: tuple[float, ...],
                n_seeds: int, width: int | None = None,
                act: ActivationSpec = TANH) -> list[tuple[float, float]]:
    """Mean final train loss per noise level, averaged over seeds.

    Seeds are shared across noise levels (paired comparison).
    """
    if width is None:
        width = cfg.widths[0]
    out = []
    for sigma in sigmas:
        cfg_s = replace(cfg, noise_sigma=sigma, widths=(width,))
        finals = []
        for k in range(n_seeds):
            seed = cfg.seed + k
            spec, test_set = make_problem(cfg_s, width, seed, act)
            best_lr, traj, _ = _run_lr_grid(
                cfg_s, spec, act, width, seed, test_set)
            if best_lr is None:
                raise FloatingPointError(
                    f"all rates diverged at sigma={sigma}, seed={seed}")
            finals.append(float(traj.train_loss[-1]))
        out.append((sigma, float(np.mean(finals))))
    return out


@dataclass
class CompareRow:
    width: int
    lmc_lr: float | None
    adamw_lr: float | None
    lmc_final_test: float | None
    adamw_final_test: float | None
    initial_test: float | None
    ratio: float | None  # lmc / adamw final test loss


def compare_optimizers(cfg: ExperimentConfig, act: ActivationSpec = TANH,
                       adamw_lr_grid: tuple[float, ...] = (1e-3, 1e-2, 1e-1),
                       ) -> list[CompareRow]:
    """LMC vs AdamW on identical data and seeds, one row per width.

    AdamW runs on the data term with the problem's lam as decoupled
    weight decay and minibatches of 16.
    """
    rows = []
    for width in cfg.widths:
        spec, test_set = make_problem(cfg, width, cfg.seed, act)
        lmc_lr, lmc_traj, _ = _run_lr_grid(
            cfg, spec, act, width, cfg.seed, test_set)

        best_alr, best_atraj, best_aloss = None, None, math.inf
        init = "zero" if cfg.init == "zero" else "gaussian"
        for alr in adamw_lr_grid:
            acfg = AdamWConfig(
                lr=alr, n_steps=cfg.n_steps, seed=cfg.seed,
                weight_decay=spec.lam,
                batch_size=min(16, spec.n), init=init,
                init_variance=0.0 if init == "zero" else 1.0 / width,
                record_stride=cfg.record_stride)
            try:
                atraj = run_adamw(spec, act, acfg, test_set=test_set)
            except FloatingPointError:
                continue
            if atraj.train_loss[-1] < best_aloss:
                best_alr, best_atraj = alr, atraj
                best_aloss = float(atraj.train_loss[-1])

        lmc_final = (None if lmc_traj is None
                     else float(lmc_traj.test_loss[-1]))
        adamw_final = (None if best_atraj is None
                       else float(best_atraj.test_loss[-1]))
        initial = (float(lmc_traj.test_loss[0]) if lmc_traj is not None
                   else None)
        ratio = (lmc_final / adamw_final
                 if lmc_final is not None and adamw_final else None)
        rows.append(CompareRow(width, lmc_lr, best_alr, lmc_final,
                               adamw_final, initial, ratio))
    return rows


def compare_to_csv(rows: list[CompareRow], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["width", "lmc_lr", "adamw_lr", "lmc_final_test",
                         "adamw_final_test", "initial_test", "ratio"])
        for r in rows:
            writer.writerow([
                r.width,
                "" if r.lmc_lr is None else repr(r.lmc_lr),
                "" if r.adamw_lr is None else repr(r.adamw_lr),
                "" if r.lmc_final_test is None else repr(r.lmc_final_test),
                "" if r.adamw_final_test is None
                else repr(r.adamw_final_test),
                "" if r.initial_test is None else repr(r.initial_test),
                "" if r.ratio is None else repr(r.ratio)])


def emit_plots(result: SweepResult, out_dir) -> list[str]:
    """One SVG of train curves and one of test curves, plus the CSVs."""
    if not result.curves:
        raise ValueError("no results to plot")
    os.makedirs(out_dir, exist_ok=True)
    written = []

    summary_path = os.path.join(out_dir, "summary.csv")
    result.to_csv(summary_path)
    written.append(summary_path)
    for width, traj in result.curves.items():
        curve_path = os.path.join(out_dir, f"curve_w{width}.csv")
        traj.to_csv(curve_path)
        written.append(curve_path)

    train_series = [(f"width {w}", t.steps.tolist(),
                     t.train_loss.tolist())
                    for w, t in result.curves.items()]
    path = os.path.join(out_dir, "train_loss.svg")
    line_plot(path, train_series, title="train loss",
              xlabel="step", ylabel="loss", log_y=True)
    written.append(path)

    test_series = [(f"width {w}", t.steps.tolist(), t.test_loss.tolist())
                   for w, t in result.curves.items()
                   if t.test_loss is not None]
    if test_series:
        path = os.path.join(out_dir, "test_loss.svg")
        line_plot(path, test_series, title="test loss",
                  xlabel="step", ylabel="loss", log_y=True)
        written.append(path)
    return written
