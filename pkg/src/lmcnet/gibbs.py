"""Exact Gibbs measures by quadrature (weight dimension <= 2) and
distance estimators between densities on a shared grid.

The Gibbs density is proportional to exp(-2 L(W) / s). Midpoint-rule
masses on a uniform grid, with automatic domain expansion until the
boundary cells are negligible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .activations import ActivationSpec
from .problem import ProblemSpec
from . import theory
from .engine import Trajectory, chain_rng

BOUNDARY_MASS_TOL = 1e-8


@dataclass(frozen=True)
class Grid:
    """Uniform per-axis grid; axes = ((lo, hi, bins), ...), 1 or 2 axes."""

    axes: tuple[tuple[float, float, int], ...]

    def __post_init__(self):
        if len(self.axes) not in (1, 2):
            raise ValueError("only 1- or 2-dimensional grids supported")
        for lo, hi, bins in self.axes:
            if hi <= lo or bins < 2:
                raise ValueError(f"bad axis ({lo}, {hi}, {bins})")

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(bins for _, _, bins in self.axes)

    def edges(self, axis: int) -> np.ndarray:
        lo, hi, bins = self.axes[axis]
        return np.linspace(lo, hi, bins + 1)

    def centers(self, axis: int) -> np.ndarray:
        e = self.edges(axis)
        return 0.5 * (e[:-1] + e[1:])

    @property
    def cell_volume(self) -> float:
        vol = 1.0
        for lo, hi, bins in self.axes:
            vol *= (hi - lo) / bins
        return vol

    def center_points(self) -> np.ndarray:
        """All cell centers, shape (prod(bins), ndim)."""
        if self.ndim == 1:
            return self.centers(0)[:, None]
        c0, c1 = self.centers(0), self.centers(1)
        g0, g1 = np.meshgrid(c0, c1, indexing="ij")
        return np.column_stack([g0.ravel(), g1.ravel()])


@dataclass(frozen=True)
class GridDensity:
    grid: Grid
    mass: np.ndarray  # shape grid.shape, sums to 1

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=np.float64)
        if mass.shape != self.grid.shape:
            raise ValueError("mass shape does not match grid")
        if np.any(mass < 0) or abs(mass.sum() - 1.0) > 1e-12:
            raise ValueError("mass must be a probability vector")
        object.__setattr__(self, "mass", mass)

    def to_csv(self, path) -> None:
        """CSV with columns cell_center_0[, cell_center_1], mass."""
        import csv

        points = self.grid.center_points()
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"cell_center_{i}"
                             for i in range(self.grid.ndim)] + ["mass"])
            for pt, m in zip(points, self.mass.ravel()):
                writer.writerow([repr(float(v)) for v in pt]
                                + [repr(float(m))])


@dataclass(frozen=True)
class EmpiricalDensity:
    grid: Grid
    mass: np.ndarray
    sample_count: int

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=np.float64)
        if mass.shape != self.grid.shape:
            raise ValueError("mass shape does not match grid")
        object.__setattr__(self, "mass", mass)


def _check_same_grid(p, q) -> None:
    if p.grid != q.grid:
        raise ValueError("densities live on different grids")


def potential_on_grid(spec: ProblemSpec, act: ActivationSpec, s: float,
                      points: np.ndarray) -> np.ndarray:
    """2 L(W)/s at each flattened weight vector in points (m, p*d)."""
    m = points.shape[0]
    Ws = points.reshape(m, spec.p, spec.d)
    z = np.einsum("mpd,nd->mpn", Ws, spec.X)
    sig = act.sigma(z)
    f = np.einsum("p,mpn->mn", spec.a, sig)
    if spec.is_mse:
        data = 0.5 * np.mean((spec.y[None, :] - f) ** 2, axis=1)
    else:
        u = -spec.y[None, :] * f
        data = np.mean(np.maximum(u, 0.0) + np.log1p(np.exp(-np.abs(u))),
                       axis=1)
    reg = 0.5 * spec.lam * np.sum(points ** 2, axis=1)
    return 2.0 * (data + reg) / s


def _initial_halfwidth(spec: ProblemSpec, act: ActivationSpec,
                       s: float) -> float:
    if spec.lam <= 0:
        raise ValueError("quadrature needs lam > 0 (light tails)")
    alpha = theory.alpha_lipschitz(spec, act)
    # minima lie within ||W|| <= alpha/lam; gaussian-scale tails beyond
    return alpha / spec.lam + 8.0 * math.sqrt(s / (2.0 * spec.lam)) + 0.5


def quadrature_gibbs(spec: ProblemSpec, act: ActivationSpec, s: float,
                     bins: int | None = None,
                     grid: Grid | None = None) -> GridDensity:
    """Gibbs measure of the loss at temperature scale s on a grid.

    Without an explicit grid, a symmetric domain is grown until the
    boundary-cell mass fraction drops below 1e-8.
    """
    ndim = spec.p * spec.d
    if ndim > 2:
        raise ValueError(f"weight dimension {ndim} unsupported (max 2)")
    if bins is None:
        bins = 2000 if ndim == 1 else 200

    if grid is not None:
        return _gibbs_on_grid(spec, act, s, grid)

    R = _initial_halfwidth(spec, act, s)
    for _ in range(80):
        g = Grid(tuple((-R, R, bins) for _ in range(ndim)))
        density = _gibbs_on_grid(spec, act, s, g)
        if _boundary_fraction(density) < BOUNDARY_MASS_TOL:
            return density
        R *= 1.5
    raise RuntimeError("Gibbs domain expansion failed to converge")


def _gibbs_on_grid(spec: ProblemSpec, act: ActivationSpec, s: float,
                   grid: Grid) -> GridDensity:
    V = potential_on_grid(spec, act, s, grid.center_points())
    V -= V.min()
    mass = np.exp(-V).reshape(grid.shape)
    total = mass.sum()
    if total <= 0:
        raise RuntimeError("Gibbs mass vanished on the grid")
    return GridDensity(grid, mass / total)


def _boundary_fraction(density: GridDensity) -> float:
    m = density.mass
    if density.grid.ndim == 1:
        return float(m[0] + m[-1])
    return float(m[0, :].sum() + m[-1, :].sum()
                 + m[:, 0].sum() + m[:, -1].sum())


def tv_distance(p, q) -> float:
    """Half the L1 distance; in [0, 1]."""
    _check_same_grid(p, q)
    return 0.5 * float(np.abs(p.mass - q.mass).sum())


def w2_distance_1d(p, q) -> float:
    """Quantile-coupling 2-Wasserstein distance between 1D grid densities."""
    _check_same_grid(p, q)
    if p.grid.ndim != 1:
        raise ValueError("w2_distance_1d needs 1D densities")
    x = p.grid.centers(0)
    cp = np.cumsum(p.mass)
    cq = np.cumsum(q.mass)
    u = np.unique(np.concatenate([[0.0], cp, cq]))
    u = u[u <= 1.0 + 1e-15]
    mids = 0.5 * (u[:-1] + u[1:])
    xp = x[np.minimum(np.searchsorted(cp, mids, side="left"), len(x) - 1)]
    xq = x[np.minimum(np.searchsorted(cq, mids, side="left"), len(x) - 1)]
    w2sq = float(np.sum(np.diff(u) * (xp - xq) ** 2))
    return math.sqrt(max(w2sq, 0.0))


def renyi2(p, q) -> float:
    """2-Renyi divergence ln sum p_i^2 / q_i; +inf on support violation."""
    _check_same_grid(p, q)
    pm = p.mass.ravel()
    qm = q.mass.ravel()
    active = pm > 0
    if np.any(qm[active] <= 0):
        return math.inf
    return float(np.log(np.sum(pm[active] ** 2 / qm[active])))


def histogram_density(samples: np.ndarray, grid: Grid) -> EmpiricalDensity:
    """Histogram of flattened weight samples on the grid; samples are
    clipped into the domain (the grid is expected to cover the support)."""
    samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    if samples.shape[1] != grid.ndim:
        samples = samples.reshape(samples.shape[0], -1)
    if samples.shape[0] == 0:
        raise ValueError("no samples")
    if grid.ndim == 1:
        e = grid.edges(0)
        clipped = np.clip(samples[:, 0], e[0], e[-1] - 1e-12 * (e[-1] - e[0]))
        counts, _ = np.histogram(clipped, bins=e)
    else:
        e0, e1 = grid.edges(0), grid.edges(1)
        c0 = np.clip(samples[:, 0], e0[0], e0[-1] - 1e-12 * (e0[-1] - e0[0]))
        c1 = np.clip(samples[:, 1], e1[0], e1[-1] - 1e-12 * (e1[-1] - e1[0]))
        counts, _, _ = np.histogram2d(c0, c1, bins=[e0, e1])
    n = samples.shape[0]
    return EmpiricalDensity(grid, counts / n, n)


def pool_snapshots(trajectories: list[Trajectory],
                   burn_in: int = 0) -> np.ndarray:
    """All recorded weight snapshots with step >= burn_in, flattened."""
    chunks = []
    for tr in trajectories:
        if tr.snapshots is None:
            raise ValueError("trajectories carry no snapshots")
        keep = tr.steps >= burn_in
        if keep.any():
            chunks.append(tr.snapshots[keep].reshape(int(keep.sum()), -1))
    if not chunks:
        raise ValueError("no snapshots after burn-in")
    return np.concatenate(chunks, axis=0)


def averaged_measure(trajectories: list[Trajectory], burn_in: int,
                     grid: Grid) -> EmpiricalDensity:
    """Histogram proxy for the time-averaged law, pooling post-burn-in
    snapshots across chains and steps."""
    return histogram_density(pool_snapshots(trajectories, burn_in), grid)


def interpolated_measure(trajectories: list[Trajectory], burn_in: int,
                         grid: Grid, spec: ProblemSpec, act: ActivationSpec,
                         h: float, s: float, seed: int = 0
                         ) -> EmpiricalDensity:
    """Like averaged_measure, but each snapshot W_kh is pushed to a
    uniformly random time inside its step interval using the
    continuous-time interpolation (fresh Brownian increment)."""
    from .problem import gradient

    samples = pool_snapshots(trajectories, burn_in)
    rng = chain_rng(seed, 10**6)
    tau = rng.uniform(0.0, h, size=samples.shape[0])
    out = np.empty_like(samples)
    for i, flat in enumerate(samples):
        W = flat.reshape(spec.p, spec.d)
        inc = rng.normal(0.0, math.sqrt(tau[i]), size=W.shape)
        Wt = W - (2.0 * tau[i] / s) * gradient(spec, act, W) \
            + math.sqrt(2.0) * inc
        out[i] = Wt.ravel()
    return histogram_density(out, grid)
