import numpy as np
import pytest

from filter_forge import SliseObjective, builtin_filter, builtin_weight
from filter_forge.filters import FilterDomainError
from filter_forge.loss import (
    from_real,
    real_gradient_from_wirtinger,
    to_real,
)
from filter_forge.weights import StepWeightFunction

from conftest import random_parameters


def finite_difference_gradient(obj, v, h=1e-7):
    fd = np.zeros_like(v)
    for i in range(v.size):
        vp, vm = v.copy(), v.copy()
        vp[i] += h
        vm[i] -= h
        fd[i] = (obj.real_loss(vp) - obj.real_loss(vm)) / (2 * h)
    return fd


class TestLossFixtures:
    def test_zolotarev_residual_under_box_weight(self, box_objective):
        filt = builtin_filter("zolotarev16")
        loss = box_objective.loss(filt.coeffs, filt.poles)
        assert loss == pytest.approx(8.09e-4, rel=0.02)

    def test_box_filter_residual(self, box_objective):
        filt = builtin_filter("box-lbfgsb16")
        loss = box_objective.loss(filt.coeffs, filt.poles)
        assert loss == pytest.approx(4.72e-4, rel=0.02)

    def test_zero_coefficients_give_constant_term(self, gamma_objective):
        # analytic: the half-line integral of the weight against the squared
        # indicator, 0.95*1 + 0.05*0.01 = 0.9505
        w = builtin_filter("zolotarev16").poles
        loss = gamma_objective.loss(np.zeros(4, complex), w)
        assert loss == pytest.approx(0.9505, rel=1e-12)
        assert loss == pytest.approx(gamma_objective.constant_term, rel=1e-12)

    def test_rejects_near_real_pole(self, gamma_objective):
        w = builtin_filter("zolotarev16").poles.copy()
        w[0] = w[0].real + 1e-11j
        with pytest.raises(FilterDomainError, match="real axis"):
            gamma_objective.loss(np.zeros(4, complex), w)


class TestQuadratureOracle:
    def test_agreement_at_random_points(self, box_objective, rng):
        for _ in range(10):
            beta, w = random_parameters(rng)
            closed = box_objective.loss(beta, w)
            quadrature = box_objective.loss_quadrature(beta, w)
            assert abs(closed - quadrature) <= 1e-8 * (1 + closed)

    def test_constant_term(self, gamma_objective):
        w = builtin_filter("zolotarev16").poles
        q = gamma_objective.loss_quadrature(np.zeros(4, complex), w)
        assert q == pytest.approx(0.9505, rel=1e-10)

    def test_weight_support_short_of_indicator(self, rng):
        # support ends inside (-1, 1); loss stays finite and non-negative
        weight = StepWeightFunction(np.array([0.5]), np.array([1.0]))
        obj = SliseObjective(weight, 4)
        beta, w = random_parameters(rng)
        closed = obj.loss(beta, w)
        assert closed >= 0.0
        assert abs(closed - obj.loss_quadrature(beta, w)) <= 1e-8 * (1 + closed)


class TestGradient:
    def test_matches_finite_differences(self, rng):
        for name in ("gamma-slise", "box-slise", "enhanced-gamma-slise"):
            obj = SliseObjective(builtin_weight(name), 4)
            beta, w = random_parameters(rng)
            v = to_real(beta, w)
            grad = obj.real_gradient(v)
            fd = finite_difference_gradient(obj, v)
            err = np.max(np.abs(grad - fd)) / (1 + np.max(np.abs(grad)))
            assert err <= 1e-6

    def test_published_box_filter_is_stationary(self, box_objective):
        # the tabulated box-constrained filter sits at its optimum: the
        # complex gradient, with the active-bound coordinate projected out,
        # is at noise level
        filt = builtin_filter("box-lbfgsb16")
        gb, gw = box_objective.gradient(filt.coeffs, filt.poles)
        active = filt.poles.imag == 0.0022
        assert active[0] and not active[1:].any()
        gw = gw.copy()
        gw[0] = 0.0  # bound active on Im(w_0); its gradient pushes into the bound
        assert max(np.max(np.abs(gb)), np.max(np.abs(gw))) <= 1e-6

    def test_conjugation_symmetry(self, gamma_objective, rng):
        beta, w = random_parameters(rng)
        _, gb, gw = gamma_objective.loss_and_gradient(beta, w)
        _, gb_c, gw_c = gamma_objective.loss_and_gradient(np.conj(beta), np.conj(w))
        np.testing.assert_allclose(gb_c, np.conj(gb), rtol=1e-12, atol=1e-14)
        np.testing.assert_allclose(gw_c, np.conj(gw), rtol=1e-12, atol=1e-14)


class TestRealEmbedding:
    def test_round_trip(self):
        filt = builtin_filter("zolotarev16")
        beta, w = from_real(to_real(filt.coeffs, filt.poles))
        np.testing.assert_array_equal(beta, filt.coeffs)
        np.testing.assert_array_equal(w, filt.poles)

    def test_toy_objective_gradient(self):
        # g(z) = conj(z) z has Wirtinger derivative conj(z); the real
        # embedding must produce (2x, 2y)
        z = 1.5 - 0.7j
        grad = real_gradient_from_wirtinger(np.array([np.conj(z)]))
        np.testing.assert_allclose(grad, [2 * z.real, 2 * z.imag])

    def test_bad_length(self):
        with pytest.raises(FilterDomainError, match="divisible by 4"):
            from_real(np.zeros(6))

    def test_real_loss_and_gradient_consistent(self, box_objective, rng):
        beta, w = random_parameters(rng)
        v = to_real(beta, w)
        value, grad = box_objective.real_loss_and_gradient(v)
        assert value == box_objective.real_loss(v)
        np.testing.assert_array_equal(grad, box_objective.real_gradient(v))


class TestLossInvariants:
    def test_non_negative(self, gamma_objective, rng):
        for _ in range(20):
            beta, w = random_parameters(rng)
            assert gamma_objective.loss(beta, w) >= 0.0

    def test_permutation_invariance(self, box_objective, rng):
        beta, w = random_parameters(rng)
        perm = rng.permutation(4)
        a = box_objective.loss(beta, w)
        b = box_objective.loss(beta[perm], w[perm])
        assert a == pytest.approx(b, rel=1e-13)

    def test_conjugate_negate_single_pole_invariance(self, box_objective, rng):
        beta, w = random_parameters(rng)
        beta2, w2 = beta.copy(), w.copy()
        beta2[1], w2[1] = -np.conj(beta2[1]), -np.conj(w2[1])
        a = box_objective.loss(beta, w)
        b = box_objective.loss(beta2, w2)
        assert a == pytest.approx(b, rel=1e-12)

    def test_infinite_outside_domain(self, box_objective):
        v = to_real(*random_parameters(np.random.default_rng(0)))
        v[12] = 1e-11  # Im(w_0) under the floor
        assert box_objective.real_loss(v) == np.inf
