"""Saddlepoint density approximation and the generalized Tweedie correction."""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.special import comb, gammaln

from src.cgf.cgf import BasicCgf
from src.errors import NoConvergence, NotAvailable, OutOfRange
from src.pearson import PearsonFit, score

logger = logging.getLogger(__name__)

SOLVER_TOL = 1e-10
MAX_ITER = 100
MAX_HALVINGS = 30


@dataclass(frozen=True)
class SaddleResult:
    """
    Attributes:
        t_hat (float): Solution of K'(t) = x.
        density (float): Saddlepoint density (pmf for discrete models) at x.
        iterations (int): Solver updates performed.
    """
    t_hat: float
    density: float
    iterations: int


def _bisection_point(t_lo: float, t_hi: float) -> float:
    if np.isfinite(t_lo) and np.isfinite(t_hi):
        return (t_lo + t_hi) / 2
    if np.isfinite(t_lo):
        return t_lo + max(1.0, abs(t_lo))
    return t_hi - max(1.0, abs(t_hi))


def _solve(model: BasicCgf, x: float, tol: float, max_iter: int) -> Tuple[float, int]:
    lo_x, hi_x = model.mean_range
    if not lo_x < x < hi_x:
        raise OutOfRange(f'x={x} lies outside the range ({lo_x}, {hi_x}) of K\' for {model.name}')
    target = tol * max(1.0, abs(x))
    t_lo, t_hi = model.domain
    t = model.initial_guess(x) if model.closed_form_inverse else 0.0
    if not (np.isfinite(t) and model.in_domain(t)):
        t = 0.0

    for iteration in range(max_iter + 1):
        resid = model.dK(t) - x
        if abs(resid) <= target:
            logger.debug('%s saddlepoint at x=%g: t=%g after %d updates', model.name, x, t, iteration)
            return float(t), iteration
        if iteration == max_iter:
            break
        # K' is increasing, so the sign of the residual tightens the bracket
        if resid > 0:
            t_hi = t
        else:
            t_lo = t
        step = resid / model.d2K(t)
        t_new = t - step
        for _ in range(MAX_HALVINGS):
            if t_lo < t_new < t_hi and abs(model.dK(t_new) - x) < abs(resid):
                break
            step /= 2
            t_new = t - step
        else:
            t_new = _bisection_point(t_lo, t_hi)
        t = t_new
    raise NoConvergence(f'saddlepoint equation for {model.name} at x={x} unsolved after {max_iter} iterations')


def solve_saddle(model: BasicCgf, x: float, tol: float = SOLVER_TOL, max_iter: int = MAX_ITER) -> float:
    """
    Solves K'(t) = x by damped Newton steps inside the natural-parameter domain.

    A step that leaves the current bracket or fails to reduce the residual is
    halved; if halving does not help, the bracket is bisected.
    """
    return _solve(model, x, tol, max_iter)[0]


def saddle_density(model: BasicCgf, x: float, tol: float = SOLVER_TOL, max_iter: int = MAX_ITER) -> SaddleResult:
    t_hat, iterations = _solve(model, x, tol, max_iter)
    log_density = model.K(t_hat) - t_hat * x - 0.5 * np.log(2 * np.pi * model.d2K(t_hat))
    return SaddleResult(t_hat=t_hat, density=float(np.exp(log_density)), iterations=iterations)


def saddle_ratio(model: BasicCgf, x: float) -> float:
    """Saddlepoint approximation divided by the exact density or pmf."""
    exact = model.exact_density(x)
    if exact is None or exact <= 0:
        raise NotAvailable(f'no exact density for {model.name} at x={x}')
    return saddle_density(model, x).density / exact


def stirling_binomial(n: int, x: float) -> float:
    """Stirling's approximation of C(n, x)."""
    log_c = (n * np.log(n) - x * np.log(x) - (n - x) * np.log(n - x)
             + 0.5 * np.log(n / (2 * np.pi * x * (n - x))))
    return float(np.exp(log_c))


def accuracy_factor(model: BasicCgf, x: float) -> float:
    """
    Closed-form ratio of the saddlepoint approximation to the exact density.

    Defined for the families where the ratio reduces to Stirling's formula:
    exponential, gamma, Poisson and binomial.
    """
    if model.name == 'exponential':
        return float(np.e / np.sqrt(2 * np.pi))
    if model.name == 'gamma':
        alpha = model.params['alpha']
        return float(np.exp(gammaln(alpha) + alpha * (1 - np.log(alpha))) * np.sqrt(alpha / (2 * np.pi)))
    if model.name == 'poisson':
        return float(np.exp(gammaln(x + 1) - x * (np.log(x) - 1)) / np.sqrt(2 * np.pi * x))
    if model.name == 'binomial':
        n = model.params['n']
        return stirling_binomial(n, x) / float(comb(n, x))
    raise NotAvailable(f'no closed-form accuracy factor for {model.name}')


def generalized_tweedie_term(model: BasicCgf, x: float) -> float:
    """
    Non-score part of E[theta | x] for a single observation.

    Returns t_hat + (1/2) (K'''(t_hat) / K''(t_hat)) / K''(t_hat).
    """
    if not model.tweedie_available:
        raise NotAvailable(f'the generalized Tweedie correction is not available for {model.name}')
    t_hat = solve_saddle(model, x)
    k2 = model.d2K(t_hat)
    return float(t_hat + 0.5 * model.d3K(t_hat) / k2 ** 2)


def generalized_tweedie_posterior(model: BasicCgf, x: float, fit: PearsonFit) -> float:
    return float(score(fit, x)) + generalized_tweedie_term(model, x)
