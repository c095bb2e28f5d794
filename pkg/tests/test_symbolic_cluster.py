import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.datasets import synthetic_systolic_intervals
from src.errors import BadK, DegenerateRange, InconsistentPartition, UsageError, ZeroDispersion
from src.symbolic_cluster import (
    DistanceKind, Partition, criterion, dca, interval_distance, pairwise_distances, standardize,
)


class TestDistances:

    @pytest.mark.parametrize('kind, expected', [
        ('l2', np.sqrt(13.0)),
        ('hausdorff', 3.0),
        ('wasserstein', np.sqrt(6.25 + 0.25 / 3)),
    ])
    def test_scalar_intervals(self, kind, expected):
        assert_allclose(interval_distance(kind, (0.0, 1.0), (2.0, 4.0)), expected)

    def test_squared_drops_the_root(self):
        assert_allclose(interval_distance('l2', (0.0, 1.0), (2.0, 4.0), squared=True), 13.0)

    def test_squared_hausdorff_rejected(self):
        with pytest.raises(UsageError):
            interval_distance('hausdorff', (0.0, 1.0), (2.0, 4.0), squared=True)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            interval_distance('manhattan', (0.0, 1.0), (2.0, 4.0))

    def test_dimensions_are_summed(self):
        X = np.array([[[0.0, 1.0], [0.0, 1.0]]])
        L = np.array([[[2.0, 4.0], [0.0, 1.0]], [[2.0, 4.0], [2.0, 4.0]]])
        assert_allclose(pairwise_distances(X, L, DistanceKind.HAUSDORFF), [[3.0, 6.0]])


class TestStandardize:

    def test_centers(self, rng):
        lower = rng.normal(5.0, 3.0, (40, 2))
        X = standardize(np.stack([lower, lower + 1.0], axis=2), 'centers')
        centers = X.mean(axis=2)
        assert_allclose(centers.mean(axis=0), 0.0, atol=1e-12)
        assert_allclose((centers ** 2).mean(axis=0), 1.0)

    def test_bounds(self, rng):
        lower = rng.normal(5.0, 3.0, (40, 1))
        X = standardize(np.stack([lower, lower + 2.0], axis=2), 'bounds')
        assert_allclose(((X[..., 0] ** 2 + X[..., 1] ** 2) / 2).mean(axis=0), 1.0)

    def test_range(self):
        X = standardize([[1.0, 3.0], [2.0, 5.0]], 'range')
        assert_allclose(X[:, 0, :], [[0.0, 0.5], [0.25, 1.0]])

    def test_none_copies(self):
        data = np.array([[[1.0, 2.0]], [[3.0, 4.0]]])
        X = standardize(data)
        X[0, 0, 0] = 10.0
        assert data[0, 0, 0] == 1.0

    def test_zero_dispersion(self):
        with pytest.raises(ZeroDispersion):
            standardize([[1.0, 3.0], [1.0, 3.0]], 'centers')
        with pytest.raises(DegenerateRange):
            standardize([[2.0, 2.0], [2.0, 2.0]], 'range')


class TestDynamicClustering:
    intervals = np.array([[0.0, 1.0], [0.5, 1.5], [10.0, 11.0], [10.5, 12.0]])

    def _brute_force(self, K):
        X = self.intervals[:, None, :]
        best = np.inf
        for labels in itertools.product(range(K), repeat=X.shape[0]):
            labels = np.array(labels)
            if len(set(labels)) < K:
                continue
            protos = np.stack([X[labels == h].mean(axis=0) for h in range(K)])
            best = min(best, criterion(X, Partition(labels, protos, 0.0, squared=True)))
        return best

    def test_reaches_the_brute_force_optimum(self):
        best = self._brute_force(2)
        for seed in range(10):
            part = dca(self.intervals, 2, 'l2', seed=seed, squared=True)
            assert_allclose(part.criterion, best, atol=1e-9)
            assert part.converged

    @pytest.mark.parametrize('kind', ['l2', 'wasserstein'])
    def test_criterion_never_increases(self, kind):
        for seed in range(50):
            X, _ = synthetic_systolic_intervals(n_per_group=10, seed=seed)
            history = dca(X, 4, kind, seed=seed, squared=True).history
            assert all(b <= a + 1e-9 for a, b in zip(history, history[1:]))

    def test_same_seed_same_partition(self):
        X, _ = synthetic_systolic_intervals(seed=1)
        first = dca(X, 3, 'hausdorff', seed=7)
        second = dca(X, 3, 'hausdorff', seed=7)
        assert np.array_equal(first.assignments, second.assignments)
        assert first.to_dict() == second.to_dict()

    def test_bad_k(self):
        with pytest.raises(BadK):
            dca(self.intervals, 0)
        with pytest.raises(BadK):
            dca(self.intervals, 5)

    def test_single_cluster(self):
        part = dca(self.intervals, 1, 'l2', squared=True)
        assert_allclose(part.prototypes[0, 0], self.intervals.mean(axis=0))

    def test_criterion_recomputes(self):
        X, _ = synthetic_systolic_intervals(seed=2)
        part = dca(X, 3, 'wasserstein', seed=4)
        assert_allclose(criterion(X, part), part.criterion)

    def test_inconsistent_partition(self):
        part = dca(self.intervals, 2, seed=0)
        broken = Partition(part.assignments[:-1], part.prototypes, part.criterion)
        with pytest.raises(InconsistentPartition):
            criterion(self.intervals, broken)
        with pytest.raises(InconsistentPartition):
            criterion(self.intervals, Partition(np.array([0, 1, 2, 0]), part.prototypes, part.criterion))

    def test_recovers_separated_populations(self):
        X, labels = synthetic_systolic_intervals(n_per_group=15, seed=0)
        part = dca(X, 3, 'l2', init_prototypes=X[[0, 15, 30]])
        assert np.mean(part.assignments == labels) >= 0.95
        assert part.converged
