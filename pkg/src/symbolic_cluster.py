"""Dynamic clustering of interval-valued objects.

Objects are (p, 2) arrays of [lower, upper] bounds; a data set is an
(n, p, 2) array. The algorithm alternates an allocation stage (each object
joins the prototype at the smallest summed distance) and a representative
stage (each prototype becomes the mean bounds of its members) until no object
moves.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Union

import numpy as np

from src.errors import BadK, DegenerateRange, InconsistentPartition, UsageError, ZeroDispersion
from src.moments import IntervalData, interval_array

logger = logging.getLogger(__name__)

MAX_ITER = 100


class DistanceKind(str, Enum):
    L2 = 'l2'
    HAUSDORFF = 'hausdorff'
    WASSERSTEIN = 'wasserstein'


class Standardization(str, Enum):
    NONE = 'none'
    CENTERS = 'centers'
    BOUNDS = 'bounds'
    RANGE = 'range'


def _kind(kind: Union[str, DistanceKind], squared: bool) -> DistanceKind:
    kind = DistanceKind(kind)
    if squared and kind is DistanceKind.HAUSDORFF:
        raise UsageError('the squared variant exists only for l2 and wasserstein')
    return kind


def pairwise_distances(X: np.ndarray, L: np.ndarray, kind: Union[str, DistanceKind] = DistanceKind.L2,
                       squared: bool = False) -> np.ndarray:
    """
    Summed per-dimension distances between objects and prototypes.

    Args:
        X (np.ndarray): (n, p, 2) objects.
        L (np.ndarray): (K, p, 2) prototypes.
        kind: Interval distance.
        squared (bool): Sum squared per-dimension distances instead.

    Returns:
        np.ndarray: (n, K) matrix.
    """
    kind = _kind(kind, squared)
    dl = X[:, None, :, 0] - L[None, :, :, 0]
    du = X[:, None, :, 1] - L[None, :, :, 1]
    if kind is DistanceKind.HAUSDORFF:
        return np.maximum(np.abs(dl), np.abs(du)).sum(axis=2)
    if kind is DistanceKind.L2:
        sq = dl ** 2 + du ** 2
    else:
        sq = ((dl + du) / 2) ** 2 + ((du - dl) / 2) ** 2 / 3
    return (sq if squared else np.sqrt(sq)).sum(axis=2)


def interval_distance(kind: Union[str, DistanceKind], x, y, squared: bool = False) -> float:
    """Distance between two scalar intervals given as (lower, upper) pairs."""
    X = np.asarray(x, dtype=float).reshape(1, 1, 2)
    Y = np.asarray(y, dtype=float).reshape(1, 1, 2)
    return float(pairwise_distances(interval_array(X), interval_array(Y), kind, squared)[0, 0])


def standardize(data: IntervalData, method: Union[str, Standardization] = Standardization.NONE) -> np.ndarray:
    """
    Standardizes every dimension of an interval data set.

    'centers' divides by the dispersion of the interval centers, 'bounds' by
    the dispersion of both bounds around the center mean, 'range' maps the
    global [Min, Max] of each dimension onto [0, 1].
    """
    X = interval_array(data).copy()
    method = Standardization(method)
    if method is Standardization.NONE:
        return X
    lower, upper = X[..., 0], X[..., 1]
    if method is Standardization.RANGE:
        lo, hi = lower.min(axis=0), upper.max(axis=0)
        if np.any(hi <= lo):
            raise DegenerateRange(f'dimension(s) {np.flatnonzero(hi <= lo).tolist()} have Max = Min')
        return (X - lo[None, :, None]) / (hi - lo)[None, :, None]

    m = ((lower + upper) / 2).mean(axis=0)
    if method is Standardization.CENTERS:
        s2 = (((lower + upper) / 2 - m) ** 2).mean(axis=0)
    else:
        s2 = (((lower - m) ** 2 + (upper - m) ** 2) / 2).mean(axis=0)
    if np.any(s2 <= 0):
        raise ZeroDispersion(f'dimension(s) {np.flatnonzero(s2 <= 0).tolist()} have zero dispersion')
    return (X - m[None, :, None]) / np.sqrt(s2)[None, :, None]


@dataclass(frozen=True, eq=False)
class Partition:
    """
    Attributes:
        assignments (np.ndarray): Cluster index of every object.
        prototypes (np.ndarray): (K, p, 2) prototype bounds.
        criterion (float): W, the summed object-to-prototype distance.
        kind (DistanceKind): Distance used.
        squared (bool): Whether per-dimension distances were squared.
        history (List[float]): W after every allocation + representative iteration.
        allocation_history (List[float]): W right after every allocation stage.
        iterations (int): Iterations run.
        converged (bool): False when max_iter stopped the run.
        seed (Optional[int]): Seed of the initial prototype draw.
    """
    assignments: np.ndarray
    prototypes: np.ndarray
    criterion: float
    kind: DistanceKind = DistanceKind.L2
    squared: bool = False
    history: List[float] = field(default_factory=list)
    allocation_history: List[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = True
    seed: Optional[int] = None

    @property
    def K(self) -> int:
        return self.prototypes.shape[0]

    def to_dict(self) -> Dict[str, Any]:
        return {'K': self.K, 'distance': self.kind.value, 'squared': self.squared, 'seed': self.seed,
                'criterion': self.criterion, 'iterations': self.iterations, 'converged': self.converged,
                'history': list(self.history), 'allocation_history': list(self.allocation_history),
                'assignments': self.assignments.tolist(), 'prototypes': self.prototypes.tolist()}


def criterion(data: IntervalData, partition: Partition, kind: Union[str, DistanceKind, None] = None,
              squared: Optional[bool] = None) -> float:
    X = interval_array(data)
    assign = np.asarray(partition.assignments)
    L = np.asarray(partition.prototypes, dtype=float)
    if assign.shape != (X.shape[0],):
        raise InconsistentPartition(f'{assign.size} assignments for {X.shape[0]} objects')
    if L.ndim != 3 or L.shape[1:] != X.shape[1:]:
        raise InconsistentPartition(f'prototypes of shape {L.shape} do not match objects of shape {X.shape[1:]}')
    if assign.size and (assign.min() < 0 or assign.max() >= L.shape[0]):
        raise InconsistentPartition(f'cluster indices must lie in [0, {L.shape[0]})')
    kind = partition.kind if kind is None else kind
    squared = partition.squared if squared is None else squared
    D = pairwise_distances(X, L, kind, squared)
    return float(D[np.arange(X.shape[0]), assign].sum())


def _repair_empty(assign: np.ndarray, D: np.ndarray, K: int) -> np.ndarray:
    assign = assign.copy()
    counts = np.bincount(assign, minlength=K)
    for h in np.flatnonzero(counts == 0):
        movable = counts[assign] > 1
        own = np.where(movable, D[np.arange(assign.size), assign], -np.inf)
        i = int(np.argmax(own))
        logger.debug('cluster %d empty, object %d moved into it', h, i)
        counts[assign[i]] -= 1
        assign[i] = h
        counts[h] = 1
    return assign


def _prototypes(X: np.ndarray, assign: np.ndarray, K: int) -> np.ndarray:
    return np.stack([X[assign == h].mean(axis=0) for h in range(K)])


class DynamicClustering:
    """
    Allocation / representative partitioning of interval objects.

    Initial prototypes are K distinct objects drawn with numpy's PCG64
    generator seeded by `seed`, unless explicit prototypes are given.
    Allocation ties go to the lowest cluster index; a cluster left empty
    receives the object farthest from its own prototype.
    """

    def __init__(self, K: int, kind: Union[str, DistanceKind] = DistanceKind.L2, seed: int = 0,
                 max_iter: int = MAX_ITER, squared: bool = False) -> None:
        self.K = K
        self.kind = _kind(kind, squared)
        self.seed = seed
        self.max_iter = max_iter
        self.squared = squared

    def _initial_prototypes(self, X: np.ndarray) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        return X[rng.choice(X.shape[0], size=self.K, replace=False)].copy()

    def run(self, data: IntervalData, init_prototypes: Optional[np.ndarray] = None) -> Partition:
        X = interval_array(data)
        n = X.shape[0]
        if not 1 <= self.K <= n:
            raise BadK(f'K must lie in [1, {n}], got {self.K}')
        if self.max_iter < 1:
            raise UsageError(f'max_iter must be at least 1, got {self.max_iter}')
        if init_prototypes is None:
            L = self._initial_prototypes(X)
        else:
            L = np.asarray(init_prototypes, dtype=float)
            if L.shape != (self.K,) + X.shape[1:]:
                raise InconsistentPartition(f'initial prototypes have shape {L.shape}')

        assign = None
        history, allocation_history = [], []
        converged = False
        iteration = 0
        for iteration in range(1, self.max_iter + 1):
            D = pairwise_distances(X, L, self.kind, self.squared)
            new_assign = _repair_empty(np.argmin(D, axis=1), D, self.K)
            allocation_history.append(float(D[np.arange(n), new_assign].sum()))
            moved = n if assign is None else int(np.count_nonzero(new_assign != assign))
            assign = new_assign
            L = _prototypes(X, assign, self.K)
            W = float(pairwise_distances(X, L, self.kind, self.squared)[np.arange(n), assign].sum())
            history.append(W)
            logger.debug('iteration %d: W=%.10g, %d object(s) moved', iteration, W, moved)
            if iteration > 1 and moved == 0:
                converged = True
                break
        if not converged:
            logger.warning('clustering stopped after %d iterations without convergence', self.max_iter)

        return Partition(assignments=assign, prototypes=L, criterion=history[-1], kind=self.kind,
                         squared=self.squared, history=history, allocation_history=allocation_history,
                         iterations=iteration, converged=converged, seed=self.seed)


def dca(data: IntervalData, K: int, kind: Union[str, DistanceKind] = DistanceKind.L2, seed: int = 0,
        max_iter: int = MAX_ITER, squared: bool = False,
        init_prototypes: Optional[np.ndarray] = None) -> Partition:
    return DynamicClustering(K, kind, seed, max_iter, squared).run(data, init_prototypes=init_prototypes)
