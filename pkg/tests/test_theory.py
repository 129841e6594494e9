import math

import numpy as np
import pytest

from lmcnet import (ProblemSpec, TANH, alpha_lipschitz, beta_bound,
                    compute_constants, critical_lambda, dissipativity,
                    excess_risk_bound, origin_bounds, radon_nikodym_bound,
                    tv_bound, tv_step_size_hint)
from lmcnet.experiments import fixed_outer_weights

from conftest import sine_spec

_TANH_M2 = 4.0 / (3.0 * math.sqrt(3.0))


def _spec(loss_kind="mse", a=(2.0,), lam=2.0, y=0.5):
    a = np.asarray(a, dtype=float)
    return ProblemSpec(a=a, X=np.array([[0.4]]), y=np.array([y]),
                       loss_kind=loss_kind, lam=lam, B_x=0.5, B_y=2.0)


class TestCriticalLambda:
    def test_mse_experimental_config_is_two(self):
        # tanh, ||a|| = 2, B_x = 1/2, M_D = L = 1
        assert critical_lambda(_spec(), TANH) == 2.0

    def test_bce_is_quarter_of_mse(self):
        spec = _spec(loss_kind="bce", y=1.0)
        assert critical_lambda(spec, TANH) == 0.5

    def test_zero_outer_weights(self):
        assert critical_lambda(_spec(a=(0.0,)), TANH) == 0.0

    def test_width_invariance_with_fixed_norm(self):
        for p in (1, 4, 16, 64, 256):
            assert critical_lambda(sine_spec(width=p), TANH) == \
                pytest.approx(2.0, rel=1e-12)


class TestBetaBound:
    def test_mse_hand_value(self):
        # sqrt(p)(|a| Bx By L' + sqrt(p)|a|^2 M^2 Bx^2
        #          + p |a|^2 Bx^2 M' Bs + lam), p=1
        expected = (2 * 0.5 * 2 * _TANH_M2 + 4 * 0.25
                    + 4 * 0.25 * _TANH_M2 + 2.0)
        assert beta_bound(_spec(), TANH) == pytest.approx(expected)
        assert beta_bound(_spec(), TANH) == pytest.approx(5.309401, abs=1e-6)

    def test_regularizer_only(self):
        spec = ProblemSpec(a=np.zeros(4), X=np.zeros((1, 1)),
                           y=np.zeros(1), loss_kind="mse", lam=1.7,
                           B_x=1.0, B_y=0.0)
        assert beta_bound(spec, TANH) == pytest.approx(2.0 * 1.7)

    def test_bce_hand_value(self):
        spec = _spec(loss_kind="bce", y=1.0)
        # sqrt(p)(sqrt(p)|a| M^2 Bx/4 + (2+|c|sqrt(p)+|a|Bs)/4 M' Bx p + lam)
        expected = (2 * 1 * 0.5 / 4
                    + (2 + 0 + 2 * 1) / 4 * _TANH_M2 * 0.5 + 2.0)
        assert beta_bound(spec, TANH) == pytest.approx(expected)

    def test_beta_at_least_lambda(self):
        for kind in ("mse", "bce"):
            spec = sine_spec(width=8, lam=2.1, loss_kind=kind)
            assert beta_bound(spec, TANH) >= spec.lam


class TestAlpha:
    def test_mse_zero_outer(self):
        assert alpha_lipschitz(_spec(a=(0.0,)), TANH) == 0.0

    def test_mse_hand_value(self):
        # sqrt(p)(|a| Bx By M + Bx sqrt(p) |a|^2 Bs M) = 2 + 2 = 4
        assert alpha_lipschitz(_spec(), TANH) == pytest.approx(4.0)

    def test_bce_hand_value(self):
        # sqrt(p)|a| Bx M (sqrt(p)/2 + sqrt(p)|a| Bs Bx / 4)
        spec = _spec(loss_kind="bce", y=1.0)
        assert alpha_lipschitz(spec, TANH) == pytest.approx(0.75)


class TestDissipativity:
    def test_m_is_half_lambda(self):
        m, _ = dissipativity(_spec(lam=2.0), TANH)
        assert m == 1.0

    def test_b_formula(self):
        # alpha = 4, lam = 2 -> b = 16 / 4 = 4
        _, b = dissipativity(_spec(lam=2.0), TANH)
        assert b == pytest.approx(4.0)

    def test_zero_outer_weights_give_zero_b(self):
        _, b = dissipativity(_spec(a=(0.0,)), TANH)
        assert b == 0.0

    def test_lambda_zero_raises(self):
        with pytest.raises(ValueError):
            dissipativity(_spec(lam=0.0), TANH)


class TestOriginBounds:
    def test_mse_tanh(self):
        A, B = origin_bounds(_spec(), TANH)
        assert A == pytest.approx(2.0)   # (By + |<a,c>|)^2 / 2 = 4/2
        assert B == pytest.approx(2.0)   # sqrt(p)|a| Bx M (By + |<a,c>|)

    def test_bce_tanh_A_is_log2(self):
        A, _ = origin_bounds(_spec(loss_kind="bce", y=1.0), TANH)
        assert A == pytest.approx(math.log(2.0))

    def test_bce_B_uses_logistic_factor(self):
        _, B = origin_bounds(_spec(loss_kind="bce", y=1.0), TANH)
        # sqrt(p)|a| Bx M * logistic(<a,c>) with <a,c> = 0
        assert B == pytest.approx(2 * 0.5 * 0.5)


class TestRadonNikodym:
    def test_mse_hand_value(self):
        # exp((2/sn) * (By + p a_max Bs)^2 / 2) = exp(0.02 * 8) = exp(0.16)
        v = radon_nikodym_bound(_spec(), TANH, n=100, s=1.0)
        assert v == pytest.approx(math.exp(0.16), rel=1e-12)

    def test_bce_hand_value(self):
        # gap = (1/2) log((1+e^u)/(1+e^-u)) = u/2 exactly, u = p a_max Bs
        spec = _spec(loss_kind="bce", y=1.0)
        v = radon_nikodym_bound(spec, TANH, n=100, s=1.0)
        assert v == pytest.approx(math.exp(2.0 / 100.0 * 1.0), rel=1e-12)

    def test_large_n_limit_is_one(self):
        assert radon_nikodym_bound(_spec(), TANH, n=10 ** 12, s=1.0) == \
            pytest.approx(1.0, abs=1e-9)

    def test_always_at_least_one(self):
        for n in (1, 10, 1000):
            for s in (0.1, 1.0, 10.0):
                assert radon_nikodym_bound(_spec(), TANH, n, s) >= 1.0

    def test_overflow_returns_inf(self):
        assert radon_nikodym_bound(_spec(), TANH, n=1, s=1e-6) == math.inf


class TestComputeConstants:
    def test_bundles_everything(self):
        c = compute_constants(_spec(), TANH, s=1.0)
        assert c.lambda_c == 2.0
        assert c.m == 1.0
        assert c.b == pytest.approx(4.0)
        assert c.C_L == pytest.approx(radon_nikodym_bound(
            _spec(), TANH, 1, 1.0))
        d = c.to_dict()
        assert set(d) == {"lambda_c", "beta", "alpha", "m", "b", "A",
                          "B", "C_L"}

    def test_cl_none_without_s(self):
        assert compute_constants(_spec(), TANH).C_L is None


class TestExcessRisk:
    def _constants(self, s=0.5, n=100):
        return compute_constants(_spec(), TANH, n=n, s=s)

    def test_term_by_term_recomputation(self):
        c = self._constants()
        p, d, s, n, eps, C_PI, kappa0 = 1, 1, 0.5, 100, 0.01, 1.3, 0.2
        got = excess_risk_bound(c, p, d, s, n, eps, C_PI, kappa0)
        c3 = (16 * math.sqrt(2)
              * (c.beta ** 2 * (c.b + s * p * d / 2) / c.m + c.B ** 2)
              * C_PI * math.sqrt(c.C_L) / s)
        t1 = c3 / n
        t2 = p * d * s / 4 * math.log(
            math.e * c.beta / c.m * (2 * c.b / (s * p * d) + 1))
        sm = kappa0 + 2 * max(1, 1 / c.m) * (
            c.b + 2 * c.B ** 2 + p * d * s / 2)
        t3 = (c.beta * math.sqrt(sm) + c.B) * 2 * C_PI * eps
        assert got == pytest.approx(t1 + t2 + t3, rel=1e-12)

    def test_vanishing_limit(self):
        # eps = 0, huge n, small s -> bound becomes small
        s = 1e-3
        c = compute_constants(_spec(), TANH, n=10 ** 9, s=s)
        v = excess_risk_bound(c, 1, 1, s, 10 ** 9, 0.0, 1.0, 0.0)
        assert 0.0 < v < 0.01

    def test_monotone_in_eps_and_n(self):
        c = self._constants()
        lo = excess_risk_bound(c, 1, 1, 0.5, 100, 0.01, 1.0, 0.0)
        assert excess_risk_bound(c, 1, 1, 0.5, 100, 0.02, 1.0, 0.0) > lo
        assert excess_risk_bound(c, 1, 1, 0.5, 200, 0.01, 1.0, 0.0) < lo

    def test_precondition_s_le_min_2_m(self):
        c = self._constants(s=0.5)
        with pytest.raises(ValueError, match="precondition"):
            excess_risk_bound(c, 1, 1, 1.5, 100, 0.0, 1.0, 0.0)  # s > m = 1


class TestTvSchedule:
    def test_hint_formula(self):
        K0, beta, p, d, N = 2.0, 5.0, 1, 1, 10 ** 4
        assert tv_step_size_hint(K0, beta, p, d, N) == pytest.approx(
            math.sqrt(K0) / (2 * beta * math.sqrt(p * d * N)))

    def test_bound_formula_and_decay(self):
        v1 = tv_bound(1.0, 5.0, 1, 1, 2.0, 10 ** 4)
        v2 = tv_bound(1.0, 5.0, 1, 1, 2.0, 4 * 10 ** 4)
        assert v1 == pytest.approx(2 * 1.0 * 5.0 * math.sqrt(2.0) / 100.0)
        assert v2 == pytest.approx(v1 / 2.0)

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            tv_step_size_hint(0.0, 5.0, 1, 1, 10)
