"""Pearson system fitted from four moments.

A Pearson density g satisfies g'(x)/g(x) = (y - a) / (c0 + c1 y + c2 y^2) with
y = x - loc, where loc is the sample mean the coefficients are expressed
about. The score g'/g is all Tweedie's formula needs from the marginal.
"""
import logging
import warnings
from dataclasses import dataclass, field
from typing import Any, Dict, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.integrate import cumulative_trapezoid, trapezoid

from src.errors import DegenerateDenominator, PoleAtX, PoleInGrid, UsageError, ZeroVariance
from src.moments import MomentSummary, classical_moments

logger = logging.getLogger(__name__)

EPSILON_A = 1e-8
EPSILON_DEN = 1e-12
MIN_GRID_POINTS = 16

ArrayLike = Union[float, Sequence[float], np.ndarray]


@dataclass(frozen=True)
class PearsonFit:
    """
    Coefficients of a fitted Pearson system.

    Attributes:
        a (float): Location coefficient, the zero of the score numerator.
        c0 (float): Constant term of the score denominator.
        c1 (float): Linear term of the score denominator, equal to a.
        c2 (float): Quadratic term of the score denominator.
        A (float): Common denominator 10 beta2 - 12 beta1^2 - 18.
        source (MomentSummary): Moments the fit was built from.
        loc (float): Origin of the coefficients (the source mean).
    """
    a: float
    c0: float
    c1: float
    c2: float
    A: float
    source: MomentSummary = field(repr=False)
    loc: float = 0.0

    @property
    def mode(self) -> float:
        return self.loc + self.a

    def denominator(self, x: ArrayLike) -> np.ndarray:
        y = np.asarray(x, dtype=float) - self.loc
        return self.c0 + self.c1 * y + self.c2 * y ** 2

    def poles(self) -> np.ndarray:
        """Real zeros of the score denominator, in data coordinates."""
        coefs = np.trim_zeros([self.c2, self.c1, self.c0], 'f')
        if len(coefs) < 2:
            return np.empty(0)
        roots = np.roots(coefs)
        return np.sort(roots[np.abs(roots.imag) < 1e-12].real) + self.loc

    def support(self) -> Tuple[float, float]:
        """Open interval between the poles nearest the mode; infinite on a side with no pole."""
        poles = self.poles()
        below, above = poles[poles < self.mode], poles[poles > self.mode]
        return (float(below[-1]) if below.size else -np.inf, float(above[0]) if above.size else np.inf)

    def to_dict(self) -> Dict[str, Any]:
        return {'a': self.a, 'c0': self.c0, 'c1': self.c1, 'c2': self.c2, 'A': self.A,
                'loc': self.loc, 'moments': self.source.to_dict()}


def fit_pearson(m: MomentSummary, epsilon_A: float = EPSILON_A) -> PearsonFit:
    """
    Fits the Pearson coefficients from skewness and kurtosis.

    Args:
        m (MomentSummary): Moments of the marginal sample.
        epsilon_A (float): Smallest admissible |A|.

    Returns:
        PearsonFit: c0 = -mu2 (4 beta2 - 3 beta1^2) / A, c1 = a = -sqrt(mu2) beta1 (beta2 + 3) / A,
        c2 = -(2 beta2 - 3 beta1^2 - 6) / A.
    """
    if m.zero_variance:
        raise ZeroVariance('cannot fit a Pearson system to a sample with zero variance')
    beta1, beta2 = m.beta1, m.beta2
    A = 10 * beta2 - 12 * beta1 ** 2 - 18
    if abs(A) <= epsilon_A:
        raise DegenerateDenominator(f'|A| = {abs(A):.3g} is within {epsilon_A} of zero '
                                    f'(beta1={beta1:.6g}, beta2={beta2:.6g})')
    c0 = -m.mu2 * (4 * beta2 - 3 * beta1 ** 2) / A
    a = -np.sqrt(m.mu2) * beta1 * (beta2 + 3) / A
    c2 = -(2 * beta2 - 3 * beta1 ** 2 - 6) / A
    fit = PearsonFit(a=float(a), c0=float(c0), c1=float(a), c2=float(c2), A=float(A), source=m, loc=m.mu1)
    logger.info('pearson fit a=%.6g c0=%.6g c2=%.6g A=%.6g', fit.a, fit.c0, fit.c2, fit.A)
    return fit


def fit_pearson_sample(sample: Sequence[float], epsilon_A: float = EPSILON_A) -> PearsonFit:
    return fit_pearson(classical_moments(sample), epsilon_A=epsilon_A)


def _checked_denominator(fit: PearsonFit, x: np.ndarray, epsilon_den: float) -> np.ndarray:
    den = fit.denominator(x)
    near = np.abs(den) <= epsilon_den
    if np.any(near):
        raise PoleAtX(f'score denominator vanishes at x={np.asarray(x)[near].ravel()[0]!r}')
    return den


def _unwrap(value: np.ndarray, x: ArrayLike):
    return float(value) if np.ndim(x) == 0 else value


def score(fit: PearsonFit, x: ArrayLike, epsilon_den: float = EPSILON_DEN):
    """g'(x)/g(x) of the fitted marginal; vectorized over x."""
    xs = np.asarray(x, dtype=float)
    den = _checked_denominator(fit, xs, epsilon_den)
    return _unwrap((xs - fit.loc - fit.a) / den, x)


def score_derivative(fit: PearsonFit, x: ArrayLike, epsilon_den: float = EPSILON_DEN):
    """Derivative of the score, -(c2 y^2 - 2 a c2 y - (a c1 + c0)) / den^2."""
    xs = np.asarray(x, dtype=float)
    den = _checked_denominator(fit, xs, epsilon_den)
    y = xs - fit.loc
    num = fit.c2 * y ** 2 - 2 * fit.a * fit.c2 * y - (fit.a * fit.c1 + fit.c0)
    return _unwrap(-num / den ** 2, x)


def moment_recurrence_residual(fit: PearsonFit, raw_moments: Sequence[float], n: int) -> float:
    """
    Residual of the Pearson moment recurrence at order n.

    raw_moments[k] is the k-th moment about fit.loc; orders up to n + 1 are
    needed.
    """
    mu = np.asarray(raw_moments, dtype=float)
    prev = mu[n - 1] if n >= 1 else 0.0
    lhs = -n * fit.c0 * prev - (n + 1) * fit.c1 * mu[n] - (n + 2) * fit.c2 * mu[n + 1]
    rhs = mu[n + 1] - fit.a * mu[n]
    return float(lhs - rhs)


def count_modes(fit: PearsonFit, xs: np.ndarray) -> int:
    """Number of sign changes of the score along a sorted grid."""
    signs = np.sign(score(fit, xs))
    signs = signs[signs != 0]
    return int(np.count_nonzero(np.diff(signs)))


def make_grid(grid: Tuple[float, float, int]) -> np.ndarray:
    lo, hi, n_points = grid
    if n_points < MIN_GRID_POINTS:
        raise UsageError(f'density grid needs at least {MIN_GRID_POINTS} points, got {n_points}')
    if not hi > lo:
        raise UsageError(f'grid bounds must satisfy lo < hi, got [{lo}, {hi}]')
    return np.linspace(lo, hi, int(n_points))


def reconstruct_density(fit: PearsonFit, grid: Tuple[float, float, int] = (-6.0, 6.0, 1201)) -> pd.DataFrame:
    """
    Integrates the score into a normalized density on a grid.

    Args:
        fit (PearsonFit): The fitted system.
        grid (Tuple[float, float, int]): lo, hi and number of points.

    Returns:
        pd.DataFrame: Columns x and density; the density integrates to 1 on the grid.
    """
    xs = make_grid(grid)
    poles = fit.poles()
    inside = poles[(poles >= xs[0]) & (poles <= xs[-1])]
    if inside.size:
        raise PoleInGrid(f'score denominator has a pole at {inside[0]:.6g} inside [{xs[0]}, {xs[-1]}]')
    try:
        s = score(fit, xs)
    except PoleAtX as err:
        raise PoleInGrid(str(err)) from err
    modes = count_modes(fit, xs)
    if modes > 1:
        warnings.warn(f'fitted score changes sign {modes} times on the grid; the marginal looks multimodal')

    log_f = cumulative_trapezoid(s, xs, initial=0.0)
    dens = np.exp(log_f - log_f.max())
    dens /= trapezoid(dens, xs)
    return pd.DataFrame({'x': xs, 'density': dens})
