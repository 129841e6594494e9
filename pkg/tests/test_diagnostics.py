import math

import numpy as np
import pytest

from lmcnet import Grid, GridDensity, LmcConfig, TANH, run_chains
from lmcnet import compute_constants
from lmcnet.diagnostics import (dissipativity_probe, empirical_log_moment,
                                grad_check, lipschitz_probe,
                                poincare_estimate_1d, second_moment_probe,
                                villani_gauge, villani_probe)

from conftest import pure_reg_spec, sine_spec


class TestGradCheck:
    def test_pure_regularizer_machine_precision(self):
        rep = grad_check(pure_reg_spec(lam=2.0, p=2, d=2), TANH, trials=5)
        assert rep.passed
        # linear gradient: error is at FD-noise level
        assert rep.worst_margin > 1e-5 - 1e-8

    def test_neural_loss_passes(self):
        rep = grad_check(sine_spec(width=4, n=20), TANH, trials=10)
        assert rep.passed

    def test_report_shape(self):
        rep = grad_check(sine_spec(width=2, n=5), TANH, trials=2)
        d = rep.to_dict()
        assert d["name"] == "grad_check"
        assert d["samples"] == 2
        assert isinstance(d["passed"], bool)


class TestLipschitzProbe:
    def test_pure_regularizer_ratio_is_lambda(self):
        # ratio = lam exactly, bound = sqrt(p) lam -> pass
        spec = pure_reg_spec(lam=2.0, p=4, d=1)
        rep = lipschitz_probe(spec, TANH, pairs=200)
        assert rep.passed
        observed = 2.0 * math.sqrt(4) - rep.worst_margin
        assert observed == pytest.approx(2.0, rel=1e-9)

    def test_neural_loss_within_bound(self):
        rep = lipschitz_probe(sine_spec(width=16), TANH, pairs=500)
        assert rep.passed

    def test_falsification_wrong_bound_fails(self):
        from lmcnet import beta_bound

        spec = sine_spec(width=16)
        wrong = beta_bound(spec, TANH) / 1000.0
        rep = lipschitz_probe(spec, TANH, pairs=500, bound=wrong)
        assert not rep.passed
        assert rep.worst_margin < 0


class TestDissipativityProbe:
    def test_pure_regularizer_passes(self):
        rep = dissipativity_probe(pure_reg_spec(lam=2.0, p=2, d=2), TANH,
                                  samples=500)
        assert rep.passed

    def test_neural_loss_passes(self):
        rep = dissipativity_probe(sine_spec(width=16), TANH, samples=500)
        assert rep.passed

    def test_falsification_doubled_m_fails(self):
        from lmcnet import dissipativity

        spec = sine_spec(width=16)
        m, b = dissipativity(spec, TANH)
        rep = dissipativity_probe(spec, TANH, samples=2000, m=10 * m, b=b)
        assert not rep.passed


class TestVillaniProbe:
    def test_pure_regularizer_closed_form(self, rng):
        # G(W) = -lam p d + (lam^2/s) ||W||^2
        spec = pure_reg_spec(lam=2.0, p=2, d=2)
        s = 0.5
        for _ in range(3):
            W = rng.normal(0.0, 3.0, size=(2, 2))
            got = villani_gauge(spec, TANH, s, W)
            want = -2.0 * 4 + (4.0 / s) * float(np.sum(W * W))
            assert got == pytest.approx(want, rel=1e-3)

    def test_neural_loss_monotone_trend(self):
        rep = villani_probe(sine_spec(width=4, n=20, lam=2.1), TANH,
                            s=0.5, directions=4)
        assert rep.passed

    def test_hutchinson_path_for_large_pd(self):
        # pd = 128 > 64 exercises the stochastic trace estimate
        spec = pure_reg_spec(lam=2.0, p=64, d=2)
        W = np.ones((64, 2))
        got = villani_gauge(spec, TANH, 1.0, W)
        want = -2.0 * 128 + 4.0 * 128.0
        assert got == pytest.approx(want, rel=1e-3)


class TestSecondMomentProbe:
    def _run(self, h, init_samples=None):
        spec = sine_spec(width=4, n=20, lam=2.1)
        constants = compute_constants(spec, TANH, s=1e-4)
        cfg = LmcConfig(h=h, s=1e-4, n_steps=200, seed=1, record_stride=50)
        if init_samples is None:
            init_samples = np.zeros((100, 4, 1))
        try:
            trajs = run_chains(spec, TANH, cfg, 4)
        except FloatingPointError:
            trajs = []
        return second_moment_probe(trajs, constants, 4, 1, 1e-4, h,
                                   init_samples)

    def test_zero_init_passes(self):
        rep = self._run(h=1e-9)
        assert rep.passed

    def test_step_size_gate(self):
        rep = self._run(h=1.0)
        assert not rep.passed
        assert "precondition" in rep.details[0]

    def test_divergent_log_moment_refused(self):
        # norms growing with sample index make the estimate diverge
        bad = np.linspace(0.1, 6.0, 200).reshape(200, 1, 1)
        rep = self._run(h=1e-9, init_samples=bad)
        assert not rep.passed
        assert "log-moment" in rep.details[0]

    def test_empirical_log_moment_gaussian(self):
        # small-variance init: log E e^{||W||^2} is finite and stable
        rng = np.random.default_rng(0)
        samples = rng.normal(0.0, 0.1, size=(5000, 2, 1))
        v = empirical_log_moment(samples)
        # log E e^{x^2} for x ~ N(0, q): -(1/2) log(1 - 2q) per entry
        q = 0.01
        assert v == pytest.approx(-1.0 * math.log(1 - 2 * q), abs=0.01)


class TestPoincare:
    def _gauss(self, sigma, bins=4000):
        g = Grid(((-8.0 * sigma, 8.0 * sigma, bins),))
        x = g.centers(0)
        mass = np.exp(-0.5 * (x / sigma) ** 2)
        return GridDensity(g, mass / mass.sum())

    def test_gaussian_constant(self):
        for sigma in (0.5, 1.0, 2.0):
            est = poincare_estimate_1d(self._gauss(sigma), 4)
            assert est == pytest.approx(sigma ** 2, rel=0.02)

    def test_uniform_constant(self):
        L = 2.0
        g = Grid(((0.0, L, 4000),))
        dens = GridDensity(g, np.full(4000, 1.0 / 4000))
        est = poincare_estimate_1d(dens, 4)
        assert est >= (L / math.pi) ** 2 * 0.98

    def test_constants_only_family_is_zero(self):
        assert poincare_estimate_1d(self._gauss(1.0), 1) == 0.0

    def test_monotone_in_family_size(self):
        dens = self._gauss(1.0)
        vals = [poincare_estimate_1d(dens, k) for k in (1, 2, 3, 5)]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
