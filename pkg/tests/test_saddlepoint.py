import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.special import factorial

from src.cgf.init_cgf import builtin_models, init_cgf
from src.errors import NotAvailable, OutOfRange, UsageError
from src.saddlepoint import (
    accuracy_factor, generalized_tweedie_posterior, generalized_tweedie_term, saddle_density, saddle_ratio,
    solve_saddle,
)


class TestSaddleDensity:

    @pytest.mark.parametrize('x', [-2.5, 0.0, 0.7, 3.0])
    def test_normal_is_exact(self, x):
        model = init_cgf('normal', {'sigma2': 2.0, 'mu': 0.5})
        assert_allclose(saddle_density(model, x).density, model.exact_density(x), rtol=1e-12)

    def test_exponential_ratio_is_constant(self):
        model = init_cgf('exponential', {'rate': 1.5})
        for x in (0.2, 1.0, 3.0, 10.0):
            assert abs(saddle_ratio(model, x) - 1.0844375514) <= 1e-6

    def test_poisson_ratio_is_stirling(self):
        x = 5
        oracle = factorial(x) / (np.sqrt(2 * np.pi * x) * (x / np.e) ** x)
        assert abs(saddle_ratio(init_cgf('poisson', {'rate': 2.0}), x) - oracle) <= 1e-4

    @pytest.mark.parametrize('name, params, x', [
        ('gamma', {'alpha': 3.0, 'beta': 2.0}, 1.3),
        ('binomial', {'n': 20, 'p': 0.3}, 7),
        ('poisson', {'rate': 4.0}, 9),
        ('exponential', {'rate': 0.5}, 2.0),
    ])
    def test_accuracy_factor_matches_ratio(self, name, params, x):
        model = init_cgf(name, params)
        assert_allclose(accuracy_factor(model, x), saddle_ratio(model, x), rtol=1e-7)

    def test_accuracy_factor_unavailable(self):
        with pytest.raises(NotAvailable):
            accuracy_factor(init_cgf('laplace'), 0.5)

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            saddle_density(init_cgf('gamma'), -1.0)
        with pytest.raises(OutOfRange):
            saddle_density(init_cgf('binomial', {'n': 10, 'p': 0.5}), 10)


class TestSolver:

    def test_beta_needs_numeric_solve(self):
        model = init_cgf('beta', {'alpha': 2.0, 'beta': 3.0})
        assert not model.closed_form_inverse
        t_hat = solve_saddle(model, 0.3)
        assert abs(model.dK(t_hat) - 0.3) <= 1e-9

    def test_laplace_stays_inside_domain(self):
        model = init_cgf('laplace', {'mu': 0.0, 'b': 1.0})
        t_hat = solve_saddle(model, 4.0)
        assert model.in_domain(t_hat)
        assert abs(model.dK(t_hat) - 4.0) <= 1e-9

    def test_closed_form_guess_is_the_root(self):
        model = init_cgf('gamma', {'alpha': 3.0, 'beta': 2.0})
        assert_allclose(solve_saddle(model, 2.0), model.initial_guess(2.0))


class TestGeneralizedTweedie:

    def test_closed_forms(self):
        sigma2, alpha, beta, k, lam = 2.0, 3.0, 2.0, 4.0, 2.0
        cases = [
            (init_cgf('normal', {'sigma2': sigma2}), lambda x: x / sigma2, [-1.0, 0.5, 2.0]),
            (init_cgf('gamma', {'alpha': alpha, 'beta': beta}), lambda x: beta - alpha / x + 1 / x, [0.5, 1.5, 4.0]),
            (init_cgf('chisquare', {'k': k}), lambda x: 0.5 - k / (2 * x) + 1 / x, [1.0, 4.0, 9.0]),
            (init_cgf('poisson', {'rate': lam}), lambda x: np.log(x / lam) + 1 / (2 * x), [1.0, 3.0, 7.0]),
        ]
        for model, closed_form, xs in cases:
            for x in xs:
                assert_allclose(generalized_tweedie_term(model, x), closed_form(x), rtol=1e-9, atol=1e-12)

    def test_exponential_term_equals_rate(self):
        model = init_cgf('exponential', {'rate': 2.0})
        for x in (0.3, 1.0, 4.0):
            assert_allclose(generalized_tweedie_term(model, x), 2.0, rtol=1e-9)

    def test_not_available_for_binomial(self):
        with pytest.raises(NotAvailable):
            generalized_tweedie_term(init_cgf('binomial'), 5)

    def test_posterior_adds_the_score(self, standard_normal_fit):
        model = init_cgf('normal', {'sigma2': 1.0})
        # score -x cancels the saddlepoint term x
        assert_allclose(generalized_tweedie_posterior(model, 1.7, standard_normal_fit), 0.0, atol=1e-10)


class TestInitCgf:

    def test_unknown_family(self):
        with pytest.raises(NotImplementedError):
            init_cgf('cauchy')

    def test_unknown_parameter(self):
        with pytest.raises(UsageError):
            init_cgf('gamma', {'shape': 2.0})

    def test_bad_probability(self):
        with pytest.raises(UsageError):
            init_cgf('binomial', {'p': 1.5})

    def test_cgf_identities(self):
        for model in builtin_models():
            assert abs(model.K(0.0)) <= 1e-12, model.name
            assert np.all(np.asarray(model.d2K(model.interior_points())) > 0), model.name
