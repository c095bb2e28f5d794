"""Classical sample moments and descriptive statistics of interval-valued data.

Interval statistics treat every observation [l, u] as a uniform density on the
interval and average those densities into an empirical mixture. All statistics
are available in bound form (l, u) and center form (c, r); both give the same
value up to rounding.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, Sequence, Union

import numpy as np
from scipy import stats

from src.errors import EmptySample, InvalidInterval, LengthMismatch, ZeroVariance

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MomentSummary:
    """
    First four central moments of a univariate sample (denominator n).

    Attributes:
        n (int): Sample size.
        mu1 (float): Mean.
        mu2 (float): Variance.
        mu3 (float): Third central moment.
        mu4 (float): Fourth central moment.
    """
    n: int
    mu1: float
    mu2: float
    mu3: float
    mu4: float

    @property
    def zero_variance(self) -> bool:
        return self.mu2 <= 0.0

    @property
    def beta1(self) -> float:
        """Skewness mu3 / mu2^(3/2)."""
        if self.zero_variance:
            raise ZeroVariance('skewness is undefined for a sample with zero variance')
        return self.mu3 / self.mu2 ** 1.5

    @property
    def beta2(self) -> float:
        """Kurtosis mu4 / mu2^2."""
        if self.zero_variance:
            raise ZeroVariance('kurtosis is undefined for a sample with zero variance')
        return self.mu4 / self.mu2 ** 2

    @classmethod
    def from_standardized(
        cls, mu2: float, beta1: float, beta2: float, mu1: float = 0.0, n: int = 0
    ) -> 'MomentSummary':
        """Builds a summary from variance, skewness and kurtosis."""
        if mu2 <= 0:
            raise ZeroVariance(f'variance must be positive, got {mu2}')
        return cls(n=n, mu1=mu1, mu2=mu2, mu3=beta1 * mu2 ** 1.5, mu4=beta2 * mu2 ** 2)

    def to_dict(self) -> Dict[str, Any]:
        res = {'n': self.n, 'mu1': self.mu1, 'mu2': self.mu2, 'mu3': self.mu3, 'mu4': self.mu4,
               'beta1': None, 'beta2': None}
        if not self.zero_variance:
            res['beta1'] = self.beta1
            res['beta2'] = self.beta2
        return res


@dataclass(frozen=True, eq=False)
class IntervalBox:
    """
    A p-dimensional interval observation stored by its bounds.

    Attributes:
        lower (np.ndarray): Lower bounds, one per dimension.
        upper (np.ndarray): Upper bounds, one per dimension.
    """
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.shape != upper.shape or lower.ndim != 1:
            raise LengthMismatch(f'bounds have shapes {lower.shape} and {upper.shape}')
        if np.any(lower > upper):
            raise InvalidInterval(f'lower bound exceeds upper bound in {lower} / {upper}')
        object.__setattr__(self, 'lower', lower)
        object.__setattr__(self, 'upper', upper)

    @classmethod
    def from_center(cls, center, half_width) -> 'IntervalBox':
        center = np.atleast_1d(np.asarray(center, dtype=float))
        half_width = np.atleast_1d(np.asarray(half_width, dtype=float))
        if np.any(half_width < 0):
            raise InvalidInterval('half-width must be nonnegative')
        return cls(center - half_width, center + half_width)

    @property
    def p(self) -> int:
        return self.lower.shape[0]

    @property
    def center(self) -> np.ndarray:
        return (self.lower + self.upper) / 2

    @property
    def half_width(self) -> np.ndarray:
        return (self.upper - self.lower) / 2

    def as_array(self) -> np.ndarray:
        """(p, 2) array of [lower, upper] rows."""
        return np.column_stack([self.lower, self.upper])


IntervalData = Union[np.ndarray, Sequence[IntervalBox], Sequence[Sequence[float]]]


def interval_array(objects: IntervalData) -> np.ndarray:
    """
    Converts interval objects to an (n, p, 2) float array of bounds.

    Accepts a list of IntervalBox, an (n, 2) array of scalar intervals or an
    (n, p, 2) array.
    """
    if len(objects) == 0:
        raise EmptySample('no interval observations')
    if isinstance(objects[0], IntervalBox):
        dims = {box.p for box in objects}
        if len(dims) != 1:
            raise LengthMismatch(f'interval objects have mixed dimensions {sorted(dims)}')
        arr = np.stack([box.as_array() for box in objects])
    else:
        arr = np.asarray(objects, dtype=float)
        if arr.ndim == 2 and arr.shape[1] == 2:
            arr = arr[:, None, :]
        if arr.ndim != 3 or arr.shape[2] != 2:
            raise InvalidInterval(f'expected (n, 2) or (n, p, 2) bounds, got shape {arr.shape}')
        if np.any(arr[..., 0] > arr[..., 1]):
            raise InvalidInterval('lower bound exceeds upper bound')
    return arr


def _scalar_bounds(intervals: IntervalData):
    arr = interval_array(intervals)
    if arr.shape[1] != 1:
        raise LengthMismatch(f'expected scalar intervals, got dimension {arr.shape[1]}')
    return arr[:, 0, 0], arr[:, 0, 1]


def classical_moments(sample: Sequence[float]) -> MomentSummary:
    x = np.asarray(sample, dtype=float).ravel()
    if x.size < 2:
        raise EmptySample(f'need at least 2 observations, got {x.size}')
    mu1 = float(np.mean(x))
    if np.ptp(x) == 0:
        logger.debug('constant sample of size %d', x.size)
        return MomentSummary(n=x.size, mu1=float(x[0]), mu2=0.0, mu3=0.0, mu4=0.0)
    mu2, mu3, mu4 = (float(stats.moment(x, moment=k)) for k in (2, 3, 4))
    return MomentSummary(n=x.size, mu1=mu1, mu2=mu2, mu3=mu3, mu4=mu4)


def symbolic_mean(intervals: IntervalData) -> float:
    lower, upper = _scalar_bounds(intervals)
    return float(np.mean((lower + upper) / 2))


def symbolic_variance(intervals: IntervalData, form: str = 'bounds') -> float:
    """
    Variance of the uniform-mixture density of a list of scalar intervals.

    Args:
        intervals: Scalar interval observations.
        form (str): 'bounds' evaluates (1/3n) sum(u^2 + ul + l^2) - mean(c)^2,
            'center' evaluates (1/3n) sum(3c^2 + r^2) - mean(c)^2.

    Returns:
        float: The symbolic sample variance.
    """
    lower, upper = _scalar_bounds(intervals)
    center = (lower + upper) / 2
    if form == 'bounds':
        second = np.mean(upper ** 2 + upper * lower + lower ** 2) / 3
    elif form == 'center':
        half = (upper - lower) / 2
        second = np.mean(3 * center ** 2 + half ** 2) / 3
    else:
        raise NotImplementedError(f'No such form {form}')
    return float(second - np.mean(center) ** 2)


def symbolic_covariance(xi: IntervalData, xj: IntervalData, form: str = 'bounds') -> float:
    """
    Symbolic covariance of two interval variables observed on the same objects.

    Only the centers enter, so symbolic_covariance(x, x) lacks the r^2 / 3
    term of symbolic_variance(x).
    """
    li, ui = _scalar_bounds(xi)
    lj, uj = _scalar_bounds(xj)
    if li.size != lj.size:
        raise LengthMismatch(f'variables have {li.size} and {lj.size} observations')
    n = li.size
    if form == 'bounds':
        si, sj = li + ui, lj + uj
        return float(np.sum(si * sj) / (4 * n) - np.sum(si) * np.sum(sj) / (4 * n ** 2))
    if form == 'center':
        ci, cj = (li + ui) / 2, (lj + uj) / 2
        return float(np.mean(ci * cj) - np.mean(ci) * np.mean(cj))
    raise NotImplementedError(f'No such form {form}')


def symbolic_covariance_matrix(objects: IntervalData) -> np.ndarray:
    """p x p symbolic covariance: symbolic variances on the diagonal, center covariances elsewhere."""
    arr = interval_array(objects)
    p = arr.shape[1]
    cov = np.empty((p, p))
    for j in range(p):
        cov[j, j] = symbolic_variance(arr[:, j, :])
        for k in range(j + 1, p):
            cov[j, k] = cov[k, j] = symbolic_covariance(arr[:, j, :], arr[:, k, :])
    return cov


def symbolic_moments(intervals: IntervalData) -> MomentSummary:
    """
    Central moments of the uniform mixture over scalar intervals.

    Uses X = c + r U with U uniform on [-1, 1]: E[U^2] = 1/3, E[U^4] = 1/5.
    mu2 agrees with symbolic_variance.
    """
    lower, upper = _scalar_bounds(intervals)
    center = (lower + upper) / 2
    half = (upper - lower) / 2
    mean = float(np.mean(center))
    d = center - mean
    mu2 = float(np.mean(d ** 2 + half ** 2 / 3))
    mu3 = float(np.mean(d ** 3 + d * half ** 2))
    mu4 = float(np.mean(d ** 4 + 2 * d ** 2 * half ** 2 + half ** 4 / 5))
    if mu2 <= 0:
        mu2 = mu3 = mu4 = 0.0
    return MomentSummary(n=lower.size, mu1=mean, mu2=mu2, mu3=mu3, mu4=mu4)
