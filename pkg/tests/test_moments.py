import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.errors import EmptySample, InvalidInterval, LengthMismatch, ZeroVariance
from src.moments import (
    IntervalBox, MomentSummary, classical_moments, interval_array, symbolic_covariance, symbolic_covariance_matrix,
    symbolic_mean, symbolic_moments, symbolic_variance,
)


class TestClassicalMoments:
    """Central moments with denominator n."""

    def test_small_sample(self):
        m = classical_moments([1.0, 2.0, 3.0, 4.0])
        assert m.n == 4
        assert_allclose([m.mu1, m.mu2, m.mu3, m.mu4], [2.5, 1.25, 0.0, 2.5625], atol=1e-14)
        assert_allclose(m.beta2, 2.5625 / 1.25 ** 2)

    def test_needs_two_observations(self):
        with pytest.raises(EmptySample):
            classical_moments([1.0])

    def test_constant_sample_has_zero_variance(self):
        m = classical_moments([3.0, 3.0, 3.0])
        assert m.zero_variance
        assert m.mu1 == 3.0
        with pytest.raises(ZeroVariance):
            _ = m.beta1
        assert m.to_dict()['beta2'] is None

    def test_from_standardized_round_trip(self):
        m = MomentSummary.from_standardized(2.0, 0.5, 4.0, mu1=1.0)
        assert_allclose([m.beta1, m.beta2, m.mu1], [0.5, 4.0, 1.0])

    def test_normal_sample_moments(self, rng):
        m = classical_moments(rng.normal(0.0, 1.0, 200000))
        assert abs(m.beta1) < 0.03
        assert abs(m.beta2 - 3.0) < 0.05


class TestIntervalBox:

    def test_lower_above_upper_rejected(self):
        with pytest.raises(InvalidInterval):
            IntervalBox([2.0], [1.0])

    def test_mismatched_bounds(self):
        with pytest.raises(LengthMismatch):
            IntervalBox([0.0, 1.0], [2.0])

    def test_center_form(self):
        box = IntervalBox.from_center([1.0, 5.0], [0.5, 2.0])
        assert_allclose(box.lower, [0.5, 3.0])
        assert_allclose(box.upper, [1.5, 7.0])
        assert box.p == 2
        assert_allclose(box.as_array(), [[0.5, 1.5], [3.0, 7.0]])

    def test_interval_array_shapes(self):
        assert interval_array([[0, 1], [2, 3]]).shape == (2, 1, 2)
        boxes = [IntervalBox([0, 0], [1, 1]), IntervalBox([1, 2], [3, 4])]
        assert interval_array(boxes).shape == (2, 2, 2)
        with pytest.raises(EmptySample):
            interval_array([])


class TestSymbolicStatistics:
    """Uniform-mixture statistics of interval data."""

    intervals = np.array([[0.0, 2.0], [2.0, 4.0]])

    def test_mean_is_mean_of_centers(self):
        assert symbolic_mean([[1, 3], [2, 6]]) == 3.0

    def test_variance_of_adjacent_intervals(self):
        # the mixture is uniform on [0, 4]
        assert_allclose(symbolic_variance(self.intervals), 16 / 12)

    def test_single_interval_variance(self):
        assert_allclose(symbolic_variance([[0.0, 1.0]]), 1 / 12)

    def test_bound_and_center_forms_agree(self, rng):
        lower = rng.normal(0, 1, 50)
        data = np.column_stack([lower, lower + rng.uniform(0, 2, 50)])
        assert_allclose(symbolic_variance(data, 'bounds'), symbolic_variance(data, 'center'), rtol=1e-12)
        other = data + rng.normal(0, 1, (50, 1))
        assert_allclose(symbolic_covariance(data, other, 'bounds'), symbolic_covariance(data, other, 'center'),
                        rtol=1e-10, atol=1e-12)

    def test_degenerate_intervals_reduce_to_classical(self, rng):
        x = rng.normal(0, 1, 30)
        data = np.column_stack([x, x])
        assert_allclose(symbolic_variance(data), np.var(x), rtol=1e-10)

    def test_covariance_lacks_width_term(self):
        assert_allclose(symbolic_covariance(self.intervals, self.intervals), 1.0)
        assert symbolic_variance(self.intervals) > symbolic_covariance(self.intervals, self.intervals)

    def test_covariance_matrix(self, rng):
        lower = rng.normal(0, 1, (20, 2))
        data = np.stack([lower, lower + 1.0], axis=2)
        cov = symbolic_covariance_matrix(data)
        assert_allclose(cov, cov.T)
        assert_allclose(cov[0, 0], symbolic_variance(data[:, 0, :]))
        assert_allclose(cov[0, 1], symbolic_covariance(data[:, 0, :], data[:, 1, :]))

    def test_symbolic_moments_of_unit_interval(self):
        m = symbolic_moments([[0.0, 1.0]])
        assert_allclose([m.mu1, m.mu2, m.mu3, m.mu4], [0.5, 1 / 12, 0.0, 1 / 80], atol=1e-15)
        assert_allclose(symbolic_moments(self.intervals).mu2, symbolic_variance(self.intervals))

    def test_vector_intervals_rejected_by_scalar_statistics(self):
        with pytest.raises(LengthMismatch):
            symbolic_mean(np.zeros((3, 2, 2)))
