"""Command-line entry point.

Subcommands: constants, train, sweep, gibbs-check, diagnose. All take a
JSON config mirroring ExperimentConfig plus --seed/--out/--threads
overrides. Exit code 0 means every check in the run passed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys

import numpy as np

from . import diagnostics, gibbs, theory
from .activations import TANH
from .engine import LmcConfig, run_chain, run_chains
from .experiments import (ExperimentConfig, compare_optimizers,
                          compare_to_csv, emit_plots, make_problem,
                          width_sweep)
from .problem import ProblemSpec

_CONFIG_KEYS = {f.name for f in dataclasses.fields(ExperimentConfig)}


def load_config(path: str | None, overrides: argparse.Namespace
                ) -> ExperimentConfig:
    raw = {}
    if path is not None:
        with open(path) as fh:
            raw = json.load(fh)
    if "lambda" in raw:  # JSON-friendly alias for lam
        raw["lam"] = raw.pop("lambda")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise SystemExit(f"unknown config keys: {sorted(unknown)}")
    for key in ("widths", "lr_grid"):
        if key in raw:
            raw[key] = tuple(raw[key])
    cfg = ExperimentConfig(**raw)
    if overrides.seed is not None:
        cfg = dataclasses.replace(cfg, seed=overrides.seed)
    if overrides.out is not None:
        cfg = dataclasses.replace(cfg, out_dir=overrides.out)
    if overrides.threads is not None:
        cfg = dataclasses.replace(cfg, threads=overrides.threads)
    return cfg


def cmd_constants(cfg: ExperimentConfig) -> int:
    spec, _ = make_problem(cfg, cfg.widths[0], cfg.seed)
    constants = theory.compute_constants(spec, TANH, s=cfg.s)
    out = {k: (v if v is None or math.isfinite(v) else None)
           for k, v in constants.to_dict().items()}
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def cmd_train(cfg: ExperimentConfig) -> int:
    width = cfg.widths[0]
    spec, test_set = make_problem(cfg, width, cfg.seed)
    lr = cfg.lr_grid[0]
    init = "zero" if cfg.init == "zero" else "gaussian"
    lmc = LmcConfig(
        h=lr * cfg.s / 2.0, s=cfg.s, n_steps=cfg.n_steps, seed=cfg.seed,
        init=init, init_variance=0.0 if init == "zero" else 1.0 / width,
        record_stride=cfg.record_stride)
    traj = run_chain(spec, TANH, lmc, test_set=test_set)
    os.makedirs(cfg.out_dir, exist_ok=True)
    path = os.path.join(cfg.out_dir, f"train_w{width}.csv")
    traj.to_csv(path)
    print(json.dumps({
        "trajectory": path,
        "final_train_loss": float(traj.train_loss[-1]),
        "final_test_loss": float(traj.test_loss[-1]),
    }, indent=2, sort_keys=True))
    return 0


def cmd_sweep(cfg: ExperimentConfig) -> int:
    result = width_sweep(cfg)
    files = emit_plots(result, cfg.out_dir)
    if cfg.optimizer == "adamw":
        rows = compare_optimizers(cfg)
        path = os.path.join(cfg.out_dir, "compare.csv")
        compare_to_csv(rows, path)
        files.append(path)
    print(json.dumps({"files": files}, indent=2, sort_keys=True))
    return 0 if all(not r.diverged or r.best_lr is not None
                    for r in result.rows) else 1


def cmd_gibbs_check(cfg: ExperimentConfig) -> int:
    """1D single-data-point toy: averaged LMC law vs the quadrature
    Gibbs measure in TV / W2 / 2-Renyi."""
    lam = 2.1 if cfg.lam == "auto" else float(cfg.lam)
    spec = ProblemSpec(a=np.array([2.0]), X=np.array([[0.4]]),
                       y=np.array([1.0]), loss_kind="mse", lam=lam,
                       B_x=0.5, B_y=2.0)
    lr = cfg.lr_grid[0]
    h = lr * cfg.s / 2.0
    burn = cfg.n_steps // 10
    lmc = LmcConfig(h=h, s=cfg.s, n_steps=cfg.n_steps, seed=cfg.seed,
                    init="zero", record_stride=max(1, cfg.n_steps // 2000),
                    snapshots=True)
    trajs = run_chains(spec, TANH, lmc, cfg.chains, threads=cfg.threads)
    mu = gibbs.quadrature_gibbs(spec, TANH, cfg.s)
    emp = gibbs.averaged_measure(trajs, burn, mu.grid)
    tv = gibbs.tv_distance(emp, mu)
    w2 = gibbs.w2_distance_1d(emp, mu)
    r2 = gibbs.renyi2(emp, mu)
    report = {
        "lam": lam, "s": cfg.s, "h": h, "n_steps": cfg.n_steps,
        "chains": cfg.chains, "tv": tv, "w2": w2,
        "renyi2": None if math.isinf(r2) else r2,
        "passed": tv < 0.05,
    }
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0 if report["passed"] else 1


def cmd_diagnose(cfg: ExperimentConfig) -> int:
    spec, _ = make_problem(cfg, cfg.widths[0], cfg.seed)
    reports = diagnostics.run_all_probes(spec, TANH, cfg.s, seed=cfg.seed,
                                         pairs=1000, samples=1000)
    print(json.dumps([r.to_dict() for r in reports], indent=2,
                     sort_keys=True))
    return 0 if all(r.passed for r in reports) else 1


_COMMANDS = {
    "constants": cmd_constants,
    "train": cmd_train,
    "sweep": cmd_sweep,
    "gibbs-check": cmd_gibbs_check,
    "diagnose": cmd_diagnose,
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="lmcnet",
        description="Langevin Monte Carlo training of depth-2 networks "
                    "with theory-constant computation and diagnostics.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None,
                       help="JSON config mirroring ExperimentConfig")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--threads", type=int, default=None)
    args = parser.parse_args(argv)
    cfg = load_config(args.config, args)
    return _COMMANDS[args.command](cfg)


if __name__ == "__main__":
    sys.exit(main())
