"""Robbins' linear empirical Bayes estimator for group means.

Every group mean is pulled toward the grand mean,
t_i = Xbar + B_i (Xbar_i - Xbar), B_i = D+ [D+ + S2 / n_i]^-1, D = U2 - v S2,
where D+ clamps the diagonal of D at zero and leaves the off-diagonal alone.
"""
import logging
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.stats import rankdata

from src.errors import DimensionMismatch, EmptySample, SingularShrinkageMatrix, TooFewGroups
from src.moments import interval_array, symbolic_covariance_matrix, symbolic_mean, symbolic_variance

logger = logging.getLogger(__name__)

COND_LIMIT = 1e12


def _check_groups(groups: Sequence[np.ndarray], value_ndim: int) -> None:
    if len(groups) < 2:
        raise TooFewGroups(f'need at least 2 groups, got {len(groups)}')
    dims = set()
    for i, g in enumerate(groups):
        if g.shape[0] == 0:
            raise EmptySample(f'group {i} has no observations')
        dims.add(g.shape[1:1 + value_ndim])
    if len(dims) != 1:
        raise DimensionMismatch(f'groups have inconsistent dimensions {sorted(dims)}')


@dataclass(frozen=True, eq=False)
class GroupedSample:
    """
    N groups of p-dimensional observations; group sizes may differ.

    Attributes:
        groups (List[np.ndarray]): One n_i x p array per group.
        labels (List): Group labels, defaulting to 0..N-1.
    """
    groups: List[np.ndarray]
    labels: Optional[List] = None

    def __post_init__(self):
        groups = []
        for g in self.groups:
            arr = np.asarray(g, dtype=float)
            groups.append(arr[:, None] if arr.ndim == 1 else arr)
        _check_groups(groups, 1)
        object.__setattr__(self, 'groups', groups)
        if self.labels is None:
            object.__setattr__(self, 'labels', list(range(len(groups))))

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, group_col: str = 'group') -> 'GroupedSample':
        value_cols = [c for c in frame.columns if c != group_col]
        labels = list(pd.unique(frame[group_col]))
        groups = [frame.loc[frame[group_col] == label, value_cols].to_numpy(dtype=float) for label in labels]
        return cls(groups=groups, labels=labels)

    @property
    def N(self) -> int:
        return len(self.groups)

    @property
    def p(self) -> int:
        return self.groups[0].shape[1]

    @property
    def sizes(self) -> np.ndarray:
        return np.array([g.shape[0] for g in self.groups])

    def shifted(self, offset) -> 'GroupedSample':
        return GroupedSample([g + np.asarray(offset, dtype=float) for g in self.groups], labels=self.labels)


@dataclass(frozen=True, eq=False)
class IntervalGroupedSample:
    """
    N groups of p-dimensional interval observations.

    Attributes:
        groups (List[np.ndarray]): One (n_i, p, 2) array of bounds per group.
        labels (List): Group labels, defaulting to 0..N-1.
    """
    groups: List[np.ndarray]
    labels: Optional[List] = None

    def __post_init__(self):
        groups = [interval_array(g) for g in self.groups]
        _check_groups(groups, 1)
        object.__setattr__(self, 'groups', groups)
        if self.labels is None:
            object.__setattr__(self, 'labels', list(range(len(groups))))

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, group_col: str = 'group') -> 'IntervalGroupedSample':
        bound_cols = [c for c in frame.columns if c != group_col]
        if len(bound_cols) == 0 or len(bound_cols) % 2:
            raise DimensionMismatch(f'expected pairs of bound columns, got {bound_cols}')
        labels = list(pd.unique(frame[group_col]))
        groups = []
        for label in labels:
            values = frame.loc[frame[group_col] == label, bound_cols].to_numpy(dtype=float)
            groups.append(values.reshape(values.shape[0], -1, 2))
        return cls(groups=groups, labels=labels)

    @property
    def N(self) -> int:
        return len(self.groups)

    @property
    def p(self) -> int:
        return self.groups[0].shape[1]

    @property
    def sizes(self) -> np.ndarray:
        return np.array([g.shape[0] for g in self.groups])

    def centers(self) -> GroupedSample:
        return GroupedSample([g.mean(axis=2) for g in self.groups], labels=self.labels)


@dataclass(frozen=True, eq=False)
class EbSummary:
    """
    Attributes:
        group_means (np.ndarray): N x p matrix of Xbar_i.
        grand_mean (np.ndarray): Xbar, the average of the group means.
        S2 (np.ndarray): Pooled within-group covariance.
        U2 (np.ndarray): Between-group covariance of the group means.
        v (float): Mean of 1 / n_i.
        sizes (np.ndarray): Group sizes n_i.
        n_singletons (int): Groups that contributed no within-group covariance.
    """
    group_means: np.ndarray
    grand_mean: np.ndarray
    S2: np.ndarray
    U2: np.ndarray
    v: float
    sizes: np.ndarray = field(repr=False)
    n_singletons: int = 0


def _between(group_means: np.ndarray) -> np.ndarray:
    return np.atleast_2d(np.cov(group_means, rowvar=False, ddof=1))


def summarize(data: GroupedSample) -> EbSummary:
    """
    Group means, pooled within covariance (denominator n_i - 1) and between
    covariance (denominator N - 1).
    """
    means = np.stack([g.mean(axis=0) for g in data.groups])
    within = [np.atleast_2d(np.cov(g, rowvar=False, ddof=1)) for g in data.groups if g.shape[0] >= 2]
    n_singletons = data.N - len(within)
    if within:
        S2 = np.mean(within, axis=0)
    else:
        S2 = np.zeros((data.p, data.p))
    if n_singletons:
        warnings.warn(f'{n_singletons} group(s) with a single observation excluded from the within covariance')
    return EbSummary(group_means=means, grand_mean=means.mean(axis=0), S2=S2, U2=_between(means),
                     v=float(np.mean(1.0 / data.sizes)), sizes=data.sizes, n_singletons=n_singletons)


def plus_part(D: np.ndarray) -> np.ndarray:
    res = np.array(D, dtype=float, copy=True)
    np.fill_diagonal(res, np.maximum(np.diag(res), 0.0))
    return res


def _shrink(summary: EbSummary, ridge: float, cond_limit: float) -> Tuple[np.ndarray, List[np.ndarray]]:
    p = summary.S2.shape[0]
    D_plus = plus_part(summary.U2 - summary.v * summary.S2)
    estimates, factors = [], []
    for i, (mean_i, n_i) in enumerate(zip(summary.group_means, summary.sizes)):
        M = D_plus + summary.S2 / n_i + ridge * np.eye(p)
        cond = np.linalg.cond(M)
        if not np.isfinite(cond) or cond > cond_limit:
            raise SingularShrinkageMatrix(
                f'shrinkage matrix of group {i} has condition number {cond:.3g}; '
                f'consider a ridge term', group=i)
        B = np.linalg.solve(M.T, D_plus.T).T
        factors.append(B)
        estimates.append(summary.grand_mean + B @ (mean_i - summary.grand_mean))
    return np.stack(estimates), factors


def estimate_with_factors(data: GroupedSample, ridge: float = 0.0,
                          cond_limit: float = COND_LIMIT) -> Tuple[np.ndarray, List[np.ndarray]]:
    summary = summarize(data)
    estimates, factors = _shrink(summary, ridge, cond_limit)
    logger.info('linear EB over %d groups, v=%.4g', data.N, summary.v)
    return estimates, factors


def estimate(data: GroupedSample, ridge: float = 0.0, cond_limit: float = COND_LIMIT) -> np.ndarray:
    """
    Linear EB estimates of the group means.

    Args:
        data (GroupedSample): The grouped observations.
        ridge (float): Optional ridge added to every shrinkage matrix before inversion.
        cond_limit (float): Largest admissible condition number of the shrinkage matrix.

    Returns:
        np.ndarray: N x p matrix, one estimate per group.
    """
    return estimate_with_factors(data, ridge, cond_limit)[0]


def within_symbolic_covariance(group: np.ndarray) -> np.ndarray:
    """
    Within-group symbolic covariance of interval observations (denominator n_i).

    Symbolic variances sit on the diagonal and center covariances elsewhere,
    so a single interval [l, u] contributes (u - l)^2 / 12.
    """
    return symbolic_covariance_matrix(group)


def interval_summary(data: IntervalGroupedSample) -> EbSummary:
    """Symbolic counterpart of summarize: centers for the means, within_symbolic_covariance for S2."""
    means = np.stack([g.mean(axis=2).mean(axis=0) for g in data.groups])
    S2 = np.mean([within_symbolic_covariance(g) for g in data.groups], axis=0)
    return EbSummary(group_means=means, grand_mean=means.mean(axis=0), S2=S2, U2=_between(means),
                     v=float(np.mean(1.0 / data.sizes)), sizes=data.sizes)


def estimate_interval_scalar(data: IntervalGroupedSample) -> np.ndarray:
    """
    Scalar interval EB: t_i = xbar + b_i (xbar_i - xbar) over symbolic means.

    s2 averages the symbolic variances of the groups, so a group holding
    one interval uses the within-interval variance (u - l)^2 / 12.
    """
    if data.p != 1:
        raise DimensionMismatch(f'scalar interval EB needs p = 1, got {data.p}')
    xbar_i = np.array([symbolic_mean(g[:, 0, :]) for g in data.groups])
    s2 = float(np.mean([symbolic_variance(g[:, 0, :]) for g in data.groups]))
    u2 = float(np.var(xbar_i, ddof=1))
    v = float(np.mean(1.0 / data.sizes))
    xbar = float(xbar_i.mean())
    d_plus = max(u2 - v * s2, 0.0)
    denom = d_plus + s2 / data.sizes
    b = np.divide(d_plus, denom, out=np.zeros_like(denom, dtype=float), where=denom > 0)
    logger.info('interval EB: grand mean %.6g, u2=%.6g, s2=%.6g', xbar, u2, s2)
    return xbar + b * (xbar_i - xbar)


def estimate_interval_vector(data: IntervalGroupedSample, ridge: float = 0.0,
                             cond_limit: float = COND_LIMIT) -> np.ndarray:
    return _shrink(interval_summary(data), ridge, cond_limit)[0]


def rank_estimates(estimates: np.ndarray) -> np.ndarray:
    """Ranks each estimate vector (1 = smallest); equal values keep index order."""
    return np.vstack([rankdata(row, method='ordinal') for row in np.atleast_2d(estimates)]).astype(int)
