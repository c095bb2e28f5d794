import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.special import digamma

from src.errors import BadLevel, BoundaryX, NonPDSigma, NonPositiveU, PoleInGrid, UsageError
from src.moments import MomentSummary
from src.pearson import fit_pearson, fit_pearson_sample, score, score_derivative
from src.tweedie import (
    binomial_log_carrier_deriv, binomial_posterior, credible_interval, local_fdr, multinomial_log_carrier_grad,
    mvn_posterior, normal_posterior_mean, normal_posterior_var, normal_variance_posterior, poisson_log_carrier_deriv,
    poisson_posterior, posterior_normal,
)


class TestNormalModel:
    """Conjugate prior mu ~ N(0, 1) with unit noise: E = z / 2, Var = 1 / 2."""

    def test_conjugate_mean_and_variance(self, conjugate_fit):
        zs = np.linspace(-3, 3, 7)
        assert_allclose(normal_posterior_mean(zs, 1.0, conjugate_fit), zs / 2, atol=1e-14)
        assert_allclose(normal_posterior_var(zs, 1.0, conjugate_fit), 0.5, atol=1e-14)

    def test_microarray_largest_z(self, microarray_fit):
        assert abs(normal_posterior_mean(5.29, 1.0, microarray_fit) - 3.56) <= 0.01

    def test_negative_variance_clamped(self):
        narrow = fit_pearson(MomentSummary.from_standardized(0.5, 0.0, 3.0))
        with pytest.warns(UserWarning, match='clamped'):
            var = normal_posterior_var(np.array([0.0, 1.0]), 1.0, narrow)
        assert_allclose(var, 0.0)

    def test_sigma2_must_be_positive(self, conjugate_fit):
        with pytest.raises(UsageError):
            normal_posterior_mean(1.0, 0.0, conjugate_fit)

    def test_batch_frame(self, conjugate_fit):
        zs = np.array([-2.0, 0.0, 4.0])
        frame = posterior_normal(zs, 1.0, conjugate_fit)
        assert list(frame.columns) == ['z', 'post_mean', 'post_var', 'ci_lo', 'ci_hi', 'fdr']
        assert frame.attrs['n_clamped'] == 0
        assert_allclose(frame['post_mean'], zs / 2, atol=1e-12)
        assert_allclose(frame['ci_hi'] - frame['ci_lo'], 2 * 1.959964 * np.sqrt(0.5), rtol=1e-6)


class TestVarianceModel:

    def test_score_at_mode_vanishes(self):
        fit = fit_pearson(MomentSummary.from_standardized(1.0, 0.0, 3.0, mu1=2.0))
        assert_allclose(normal_variance_posterior(2.0, 4, fit), 2.0 * 1.5)

    def test_non_positive_u(self, standard_normal_fit):
        with pytest.raises(NonPositiveU):
            normal_variance_posterior([1.0, 0.0], 4, standard_normal_fit)


class TestBinomialCarrier:
    """Stirling approximation of d/dx log C(n, x)."""

    def test_antisymmetry(self):
        n = 10
        for x in range(1, n):
            assert_allclose(binomial_log_carrier_deriv(x, n)[0], -binomial_log_carrier_deriv(n - x, n)[0],
                            atol=1e-12)

    def test_digamma_agreement(self):
        n, x = 10, 2
        exact = digamma(n - x + 1) - digamma(x + 1)
        assert abs(binomial_log_carrier_deriv(x, n)[0] - exact) < 0.02

    def test_second_derivative_matches_finite_difference(self):
        n, x, h = 20, 6.5, 1e-5
        numeric = (binomial_log_carrier_deriv(x + h, n)[0] - binomial_log_carrier_deriv(x - h, n)[0]) / (2 * h)
        assert_allclose(binomial_log_carrier_deriv(x, n)[1], numeric, rtol=1e-6)

    def test_boundary_counts(self):
        with pytest.raises(BoundaryX):
            binomial_log_carrier_deriv(0, 10)
        with pytest.raises(BoundaryX):
            binomial_log_carrier_deriv(10, 10)

    def test_posterior_at_center(self):
        fit = fit_pearson(MomentSummary.from_standardized(4.0, 0.0, 3.0, mu1=5.0))
        theta, p = binomial_posterior(5, 10, fit)
        assert_allclose([theta, p], [0.0, 0.5], atol=1e-12)

    def test_log_odds_sign_follows_the_observed_proportion(self, rng):
        n = 50
        x = rng.binomial(n, rng.beta(2.0, 2.0, 3000)).astype(float)
        x = x[(x > 0) & (x < n) & (x != n / 2)]
        fit = fit_pearson_sample(x)
        theta = np.array([binomial_posterior(xi, n, fit)[0] for xi in x])
        agree = np.sign(theta) == np.sign(np.log(x / (n - x)))
        assert agree.mean() >= 0.9

    def test_multinomial_permutation_equivariance(self, rng):
        free = rng.uniform(1.0, 5.0, 4)
        n = free.sum() + 3.0
        perm = np.array([2, 0, 3, 1])
        grad = multinomial_log_carrier_grad(np.append(free, 3.0), n)
        permuted = multinomial_log_carrier_grad(np.append(free[perm], 3.0), n)
        assert_allclose(permuted, grad[perm], rtol=1e-12)

    def test_multinomial_with_two_cells_is_binomial(self):
        assert_allclose(multinomial_log_carrier_grad([3, 7], 10), [binomial_log_carrier_deriv(3, 10)[0]])

    def test_multinomial_cells_must_sum_to_n(self):
        with pytest.raises(BoundaryX):
            multinomial_log_carrier_grad([3, 3, 3], 10)
        assert multinomial_log_carrier_grad([2, 3, 5], 10).shape == (2,)


class TestPoissonCarrier:

    def test_stirling_derivative(self):
        assert_allclose(poisson_log_carrier_deriv(4.0), -np.log(4.0) - 1 / 8)

    def test_rate_when_marginal_score_vanishes(self):
        fit = fit_pearson(MomentSummary.from_standardized(2.0, 0.0, 3.0, mu1=4.0))
        assert_allclose(poisson_posterior(4.0, fit), 4.0 * np.exp(1 / 8))

    def test_zero_count(self, standard_normal_fit):
        with pytest.raises(BoundaryX):
            poisson_posterior([0.0, 1.0], standard_normal_fit)


class TestMultivariateNormal:

    def test_identity_covariance(self):
        x = np.array([1.0, -2.0])
        est = mvn_posterior(x, np.eye(2), -x, [-1.0, -1.0])
        assert_allclose(est.post_mean, 0.0)
        assert_allclose(est.post_var, 0.0, atol=1e-15)

    def test_conjugate_coordinates_halve_x(self, conjugate_fit):
        x = np.array([1.5, -0.4, 2.0])
        est = mvn_posterior(x, np.eye(3), score(conjugate_fit, x), score_derivative(conjugate_fit, x))
        assert_allclose(est.post_mean, x / 2)
        assert_allclose(est.post_var, np.eye(3) / 2)

    def test_diagonal_sigma_scales_the_correction(self):
        x = np.array([1.0, 1.0])
        est = mvn_posterior(x, np.diag([1.0, 4.0]), [-0.5, -0.5], [0.0, 0.0])
        correction = est.post_mean - x
        assert_allclose(correction, [-0.5, -2.0])
        assert_allclose(correction[1], 4 * correction[0])

    def test_rejects_indefinite_sigma(self):
        with pytest.raises(NonPDSigma):
            mvn_posterior([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]], [0.0, 0.0], [0.0, 0.0])


class TestCredibleInterval:

    def test_quantiles(self):
        assert_allclose(credible_interval(0.0, 1.0, 0.95), (-1.959964, 1.959964), atol=1e-6)
        assert_allclose(credible_interval(0.0, 1.0, 0.5), (-0.674490, 0.674490), atol=1e-6)

    def test_width_grows_with_variance_and_level(self):
        widths = [np.diff(credible_interval(1.0, var, 0.9))[0] for var in (0.0, 0.5, 1.0, 4.0)]
        assert widths[0] == 0.0
        assert np.all(np.diff(widths) > 0)
        widths = [np.diff(credible_interval(1.0, 2.0, level))[0] for level in (0.5, 0.8, 0.95, 0.99)]
        assert np.all(np.diff(widths) > 0)

    def test_bad_level(self):
        with pytest.raises(BadLevel):
            credible_interval(0.0, 1.0, 1.0)


class TestLocalFdr:

    def test_conjugate_closed_form(self, conjugate_fit):
        # phi(z) / N(0, 2) density = sqrt(2) exp(-z^2 / 4)
        assert_allclose(local_fdr(4.0, conjugate_fit), np.sqrt(2) * np.exp(-4.0), atol=1e-4)

    def test_clipped_to_one(self, conjugate_fit):
        assert local_fdr(0.0, conjugate_fit) == 1.0

    def test_null_marginal_gives_one(self, standard_normal_fit):
        zs = np.linspace(-4.0, 4.0, 81)
        assert_allclose(local_fdr(zs, standard_normal_fit), 1.0, atol=1e-4)

    def test_light_tailed_fit_stays_inside_the_support(self):
        fit = fit_pearson(MomentSummary.from_standardized(1.0, 0.0, 2.2))
        left, right = fit.support()
        assert_allclose([left, right], [-np.sqrt(5.5), np.sqrt(5.5)])
        zs = np.linspace(-2.3, 2.3, 47)
        fdr = local_fdr(zs, fit)
        assert np.all(np.isfinite(fdr)) and np.all((fdr >= 0) & (fdr <= 1))
        frame = posterior_normal(zs, 1.0, fit)
        assert frame['fdr'].between(0, 1).all()
        with pytest.raises(PoleInGrid):
            local_fdr([0.0, 2.5], fit)

    def test_pi0_range(self, conjugate_fit):
        with pytest.raises(UsageError):
            local_fdr(1.0, conjugate_fit, pi0=0.0)
