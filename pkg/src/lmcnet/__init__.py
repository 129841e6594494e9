"""Langevin Monte Carlo training of depth-2 neural networks, with
closed-form theory constants, an exact quadrature Gibbs oracle, and
assumption diagnostics."""

from .activations import SIGMOID, TANH, ActivationSpec, get_activation
from .backend import BACKEND
from .engine import (AdamWConfig, LmcConfig, Trajectory, chain_rng,
                     init_weights, interpolate, lmc_step, run_adamw,
                     run_chain, run_chains)
from .gibbs import (EmpiricalDensity, Grid, GridDensity, averaged_measure,
                    histogram_density, interpolated_measure,
                    quadrature_gibbs, renyi2, tv_distance, w2_distance_1d)
from .problem import (ProblemSpec, data_term, empirical_loss, forward,
                      gradient, load_dataset, predict, save_dataset)
from .theory import (TheoryConstants, alpha_lipschitz, beta_bound,
                     compute_constants, critical_lambda, dissipativity,
                     excess_risk_bound, origin_bounds,
                     radon_nikodym_bound, tv_bound, tv_step_size_hint)

__version__ = "0.1.0"

__all__ = [
    "ActivationSpec", "TANH", "SIGMOID", "get_activation", "BACKEND",
    "ProblemSpec", "forward", "predict", "empirical_loss", "gradient",
    "data_term", "save_dataset", "load_dataset",
    "TheoryConstants", "critical_lambda", "beta_bound", "alpha_lipschitz",
    "dissipativity", "origin_bounds", "radon_nikodym_bound",
    "compute_constants", "excess_risk_bound", "tv_step_size_hint",
    "tv_bound",
    "LmcConfig", "AdamWConfig", "Trajectory", "chain_rng", "init_weights",
    "lmc_step", "interpolate", "run_chain", "run_chains", "run_adamw",
    "Grid", "GridDensity", "EmpiricalDensity", "quadrature_gibbs",
    "tv_distance", "w2_distance_1d", "renyi2", "histogram_density",
    "averaged_measure", "interpolated_measure",
    "__version__",
]
