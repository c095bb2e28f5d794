"""Posterior cumulants through Tweedie's formula.

For an exponential family with carrier g0, E[theta | x] = g'(x)/g(x) - l0'(x)
and Var[theta | x] = (g'/g)'(x) - l0''(x), where g is the marginal density and
l0 = log g0. The marginal score comes from a Pearson fit.
"""
import logging
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.special import expit
from scipy.stats import norm

from src.errors import BadLevel, BoundaryX, LengthMismatch, NonPDSigma, NonPositiveU, PoleInGrid, UsageError
from src.pearson import MIN_GRID_POINTS, PearsonFit, reconstruct_density, score, score_derivative

logger = logging.getLogger(__name__)

FDR_GRID_STEP = 0.005

ArrayLike = Union[float, Sequence[float], np.ndarray]


@dataclass(frozen=True, eq=False)
class PosteriorEstimate:
    """
    First two posterior cumulants for one observation or a batch.

    Attributes:
        x: Observed value(s).
        post_mean: Posterior mean (scalar, vector or batch).
        post_var: Posterior variance, or covariance matrix in the multivariate case.
        model (str): Sampling model tag.
        n_clamped (int): Number of negative variance estimates set to 0.
    """
    x: np.ndarray
    post_mean: np.ndarray
    post_var: np.ndarray
    model: str
    n_clamped: int = 0


def _positive_sigma2(sigma2: float) -> None:
    if not sigma2 > 0:
        raise UsageError(f'sigma2 must be positive, got {sigma2}')


def _clamp_variance(raw: np.ndarray) -> Tuple[np.ndarray, int]:
    negative = raw < 0
    n_clamped = int(np.count_nonzero(negative))
    if n_clamped:
        warnings.warn(f'{n_clamped} negative posterior variance estimate(s) clamped at 0')
    return np.where(negative, 0.0, raw), n_clamped


def normal_posterior_mean(z: ArrayLike, sigma2: float, fit: PearsonFit):
    _positive_sigma2(sigma2)
    res = np.asarray(z, dtype=float) + sigma2 * np.asarray(score(fit, z))
    return float(res) if np.ndim(z) == 0 else res


def normal_posterior_var(z: ArrayLike, sigma2: float, fit: PearsonFit):
    """sigma2 + sigma2^2 (g'/g)'(z), clamped at 0."""
    _positive_sigma2(sigma2)
    raw = sigma2 + sigma2 ** 2 * np.asarray(score_derivative(fit, z))
    var, _ = _clamp_variance(np.asarray(raw, dtype=float))
    return float(var) if np.ndim(z) == 0 else var


def normal_variance_posterior(u: ArrayLike, nu: int, h_fit: PearsonFit):
    """
    Posterior mean of a group variance from its chi-square estimate.

    Args:
        u: Observed variance estimate(s) u = sigma2 chi2_nu / nu.
        nu (int): Degrees of freedom.
        h_fit (PearsonFit): Pearson fit to the collection of u values.

    Returns:
        u (1 + 2/nu) + (2/nu) u^2 h'(u)/h(u).
    """
    us = np.asarray(u, dtype=float)
    if np.any(us <= 0):
        raise NonPositiveU(f'variance estimates must be positive, got min {us.min()}')
    if nu < 1:
        raise UsageError(f'degrees of freedom must be at least 1, got {nu}')
    res = us * (1 + 2 / nu) + (2 / nu) * us ** 2 * np.asarray(score(h_fit, us))
    return float(res) if np.ndim(u) == 0 else res


def _stirling_grad(x: np.ndarray, rest: np.ndarray) -> np.ndarray:
    # d/dx of -log x! - log rest! under Stirling, with rest = n - x
    return np.log(rest / x) + (x - rest) / (2 * x * rest)


def binomial_log_carrier_deriv(x: float, n: int) -> Tuple[float, float]:
    """First and second derivatives of log C(n, x) under Stirling's approximation."""
    if not 0 < x < n:
        raise BoundaryX(f'binomial count must lie strictly inside (0, {n}), got {x}')
    rest = n - x
    l0p = float(_stirling_grad(np.float64(x), np.float64(rest)))
    l0pp = -n / (x * rest) + (n ** 2 - 2 * n * x + 2 * x ** 2) / (2 * x ** 2 * rest ** 2)
    return l0p, float(l0pp)


def binomial_posterior(x: float, n: int, fit: PearsonFit) -> Tuple[float, float]:
    """Posterior mean of the log-odds and its logistic transform."""
    l0p, _ = binomial_log_carrier_deriv(x, n)
    theta = score(fit, x) - l0p
    return float(theta), float(expit(theta))


def multinomial_log_carrier_grad(x: Sequence[float], n: int) -> np.ndarray:
    """
    Gradient of the Stirling-approximated log multinomial coefficient.

    Args:
        x: The k cell counts; the last cell is n minus the others.
        n (int): Number of trials.

    Returns:
        np.ndarray: k - 1 partial derivatives with respect to the free counts.
    """
    counts = np.asarray(x, dtype=float)
    if counts.ndim != 1 or counts.size < 2:
        raise LengthMismatch(f'need at least 2 cell counts, got shape {counts.shape}')
    free = counts[:-1]
    rest = n - free.sum()
    if np.any(free <= 0) or rest <= 0:
        raise BoundaryX(f'every cell count must be positive, got {counts} with n={n}')
    if abs(counts[-1] - rest) > 1e-9 * max(1.0, n):
        raise BoundaryX(f'cell counts sum to {counts.sum()}, expected {n}')
    return _stirling_grad(free, np.full_like(free, rest))


def poisson_log_carrier_deriv(x: ArrayLike):
    """Derivative of -log x! under Stirling: -log x - 1/(2x)."""
    xs = np.asarray(x, dtype=float)
    if np.any(xs <= 0):
        raise BoundaryX('Poisson counts must be positive for the Stirling carrier')
    res = -np.log(xs) - 1 / (2 * xs)
    return float(res) if np.ndim(x) == 0 else res


def poisson_posterior_transform(score_diff: ArrayLike):
    return np.exp(score_diff)


def poisson_posterior(x: ArrayLike, fit: PearsonFit):
    """Rate estimate exp(g'/g - l0') for Poisson counts."""
    return poisson_posterior_transform(np.asarray(score(fit, x)) - poisson_log_carrier_deriv(x))


def mvn_posterior(x: Sequence[float], Sigma: np.ndarray, scores: Sequence[float],
                  score_derivs: Sequence[float]) -> PosteriorEstimate:
    """
    Multivariate normal Tweedie step with a diagonal second-derivative matrix.

    Args:
        x: Observation vector.
        Sigma: Known sampling covariance.
        scores: Per-coordinate marginal scores at x.
        score_derivs: Per-coordinate score derivatives at x.

    Returns:
        PosteriorEstimate: mean x + Sigma scores and covariance Sigma + Sigma diag(score_derivs) Sigma.
    """
    xv = np.asarray(x, dtype=float)
    S = np.atleast_2d(np.asarray(Sigma, dtype=float))
    s = np.asarray(scores, dtype=float)
    ds = np.asarray(score_derivs, dtype=float)
    p = xv.size
    if S.shape != (p, p) or s.shape != (p,) or ds.shape != (p,):
        raise LengthMismatch(f'inconsistent shapes x={xv.shape}, Sigma={S.shape}, scores={s.shape}')
    if not np.allclose(S, S.T, rtol=1e-12, atol=1e-14):
        raise NonPDSigma('Sigma is not symmetric')
    try:
        np.linalg.cholesky(S)
    except np.linalg.LinAlgError as err:
        raise NonPDSigma('Sigma is not positive definite') from err
    mean = xv + S @ s
    cov = S + S @ np.diag(ds) @ S
    return PosteriorEstimate(x=xv, post_mean=mean, post_var=cov, model='mvn')


def credible_interval(post_mean: ArrayLike, post_var: ArrayLike, level: float = 0.95):
    """Normal-approximation interval post_mean -/+ z_{(1+level)/2} sqrt(post_var)."""
    if not 0 < level < 1:
        raise BadLevel(f'level must lie in (0, 1), got {level}')
    var = np.asarray(post_var, dtype=float)
    if np.any(var < 0):
        raise UsageError('posterior variance must be nonnegative')
    half = norm.ppf((1 + level) / 2) * np.sqrt(var)
    lo, hi = np.asarray(post_mean) - half, np.asarray(post_mean) + half
    if np.ndim(post_mean) == 0 and np.ndim(post_var) == 0:
        return float(lo), float(hi)
    return lo, hi


def _fdr_grid(zs: np.ndarray, fit: PearsonFit) -> Tuple[float, float, int]:
    left, right = fit.support()
    outside = np.atleast_1d(zs)[(np.atleast_1d(zs) <= left) | (np.atleast_1d(zs) >= right)]
    if outside.size:
        raise PoleInGrid(f'z = {outside[0]:.6g} lies outside the support ({left:.6g}, {right:.6g}) '
                         f'of the fitted marginal')
    # keep one grid step clear of a pole
    margin = min(FDR_GRID_STEP, (right - left) / 4)
    lo = max(min(-8.0, float(zs.min()) - 1.0), left + margin)
    hi = min(max(8.0, float(zs.max()) + 1.0), right - margin)
    return lo, hi, max(MIN_GRID_POINTS, int(round((hi - lo) / FDR_GRID_STEP)) + 1)


def local_fdr(z: ArrayLike, fit: PearsonFit, pi0: float = 1.0,
              grid: Optional[Tuple[float, float, int]] = None):
    """
    Local false discovery rate pi0 phi(z) / f(z), clamped to [0, 1].

    The null density is the standard normal phi, so z-values observed with
    sigma2 != 1 must be standardized first. f is the Pearson marginal
    integrated on a grid that covers every z and stays inside the support of
    the fit; z-values next to a pole take the density one grid step inside,
    and a z beyond a pole raises PoleInGrid.
    """
    if not 0 < pi0 <= 1:
        raise UsageError(f'pi0 must lie in (0, 1], got {pi0}')
    zs = np.asarray(z, dtype=float)
    if grid is None:
        grid = _fdr_grid(zs, fit)
    dens = reconstruct_density(fit, grid)
    f_hat = np.interp(zs, dens['x'].to_numpy(), dens['density'].to_numpy())
    with np.errstate(divide='ignore'):
        fdr = np.clip(pi0 * norm.pdf(zs) / f_hat, 0.0, 1.0)
    return float(fdr) if np.ndim(z) == 0 else fdr


def posterior_normal(z: Sequence[float], sigma2: float, fit: PearsonFit, level: float = 0.95,
                     pi0: float = 1.0) -> pd.DataFrame:
    """
    Batch Tweedie output for the normal model.

    Returns:
        pd.DataFrame: Columns z, post_mean, post_var, ci_lo, ci_hi, fdr; the
        number of clamped variances is stored in frame.attrs['n_clamped'].
    """
    zs = np.asarray(z, dtype=float)
    _positive_sigma2(sigma2)
    mean = zs + sigma2 * score(fit, zs)
    var, n_clamped = _clamp_variance(sigma2 + sigma2 ** 2 * score_derivative(fit, zs))
    lo, hi = credible_interval(mean, var, level)
    frame = pd.DataFrame({'z': zs, 'post_mean': mean, 'post_var': var, 'ci_lo': lo, 'ci_hi': hi,
                          'fdr': local_fdr(zs, fit, pi0)})
    frame.attrs['n_clamped'] = n_clamped
    logger.info('normal posterior for %d values, %d variances clamped', zs.size, n_clamped)
    return frame
