"""Built-in validation suite behind `ebkit check`.

Every check returns (passed, detail) and compares library output against a
closed form or a published value.
"""
import logging
from typing import Callable, Dict, Iterable, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.special import factorial
from tqdm import tqdm

from src.cgf.init_cgf import builtin_models, init_cgf
from src.datasets import HORSES_GRAND_MEAN, horses_grouped, load_horses_published
from src.errors import EbkitError
from src.linear_eb import estimate_interval_scalar
from src.moments import MomentSummary
from src.pearson import fit_pearson, score
from src.ranking import all_standardized
from src.saddlepoint import generalized_tweedie_term, saddle_density, saddle_ratio
from src.tweedie import binomial_log_carrier_deriv, normal_posterior_mean

logger = logging.getLogger(__name__)

CheckResult = Tuple[bool, str]

MICROARRAY_MOMENTS = (1.2885, 0.04181, 3.6445)
MICROARRAY_FIT = {'c0': -1.019168, 'a': -0.017116, 'c2': -0.069679, 'A': 18.42417}
EXPONENTIAL_RATIO = np.e / np.sqrt(2 * np.pi)


def check_pearson_normal() -> CheckResult:
    fit = fit_pearson(MomentSummary.from_standardized(1.0, 0.0, 3.0))
    xs = np.linspace(-3, 3, 7)
    ok = (np.isclose(fit.A, 12) and np.isclose(fit.c0, -1) and abs(fit.a) < 1e-15 and abs(fit.c2) < 1e-15
          and np.allclose(score(fit, xs), -xs, rtol=0, atol=1e-12))
    return bool(ok), f'A={fit.A:.6g} c0={fit.c0:.6g} a={fit.a:.3g} c2={fit.c2:.3g}'


def check_pearson_microarray() -> CheckResult:
    fit = fit_pearson(MomentSummary.from_standardized(*MICROARRAY_MOMENTS))
    errors = {key: abs(getattr(fit, key) - value) for key, value in MICROARRAY_FIT.items()}
    worst = max(errors, key=errors.get)
    return errors[worst] <= 5e-4, f'largest deviation {errors[worst]:.2e} on {worst}'


def check_microarray_posterior() -> CheckResult:
    fit = fit_pearson(MomentSummary.from_standardized(*MICROARRAY_MOMENTS))
    value = normal_posterior_mean(5.29, 1.0, fit)
    return abs(value - 3.56) <= 0.01, f'E[mu | z=5.29] = {value:.4f}'


def check_saddle_normal_exact() -> CheckResult:
    model = init_cgf('normal', {'sigma2': 2.0, 'mu': 0.5})
    xs = np.linspace(-3, 3, 7)
    rel = max(abs(saddle_density(model, x).density / model.exact_density(x) - 1) for x in xs)
    return rel <= 1e-12, f'max relative error {rel:.2e}'


def check_saddle_exponential_ratio() -> CheckResult:
    model = init_cgf('exponential', {'rate': 1.5})
    ratios = np.array([saddle_ratio(model, x) for x in (0.2, 1.0, 3.0, 10.0)])
    dev = float(np.max(np.abs(ratios - EXPONENTIAL_RATIO)))
    return dev <= 1e-6, f'ratios {np.round(ratios, 8).tolist()}'


def check_saddle_poisson_ratio() -> CheckResult:
    x = 5
    oracle = factorial(x) / (np.sqrt(2 * np.pi * x) * (x / np.e) ** x)
    ratio = saddle_ratio(init_cgf('poisson', {'rate': 2.0}), x)
    return abs(ratio - oracle) <= 1e-4, f'ratio {ratio:.8f}, factorial oracle {oracle:.8f}'


def _tweedie_closed_forms() -> Dict[str, Tuple[object, Callable[[float], float], np.ndarray]]:
    sigma2, alpha, beta, k, lam = 2.0, 3.0, 2.0, 4.0, 2.0
    return {
        'normal': (init_cgf('normal', {'sigma2': sigma2}), lambda x: x / sigma2, np.linspace(-2, 2, 5)),
        'gamma': (init_cgf('gamma', {'alpha': alpha, 'beta': beta}),
                  lambda x: beta - alpha / x + 1 / x, np.linspace(0.5, 4, 5)),
        'chisquare': (init_cgf('chisquare', {'k': k}), lambda x: 0.5 - k / (2 * x) + 1 / x, np.linspace(1, 9, 5)),
        'poisson': (init_cgf('poisson', {'rate': lam}), lambda x: np.log(x / lam) + 1 / (2 * x),
                    np.linspace(1, 9, 5)),
    }


def check_tweedie_corrections() -> CheckResult:
    worst = 0.0
    for model, closed_form, xs in _tweedie_closed_forms().values():
        for x in xs:
            expected = closed_form(x)
            worst = max(worst, abs(generalized_tweedie_term(model, x) - expected) / max(1.0, abs(expected)))
    exp_model = init_cgf('exponential', {'rate': 2.0})
    exp_dev = max(abs(generalized_tweedie_term(exp_model, x) - 2.0) for x in (0.3, 1.0, 4.0))
    ok = worst <= 1e-9 and exp_dev <= 1e-9
    return ok, f'worst relative error {worst:.2e}; exponential term equals rate within {exp_dev:.1e}'


def check_cgf_identities() -> CheckResult:
    failed = []
    for model in builtin_models():
        ts = model.interior_points()
        if abs(model.K(0.0)) > 1e-12 or np.any(np.asarray(model.d2K(ts)) <= 0):
            failed.append(model.name)
    return not failed, 'all built-in CGFs' if not failed else f'failed: {failed}'


def check_horse_affine() -> CheckResult:
    table = load_horses_published()
    c, t = table['center'].to_numpy(), table['eb_estimate'].to_numpy()
    b = (t[0] - t[1]) / (c[0] - c[1])
    intercept = t[0] - b * c[0]
    published_dev = float(np.max(np.abs(intercept + b * c[2:] - t[2:])))
    # the published intercept shrinks toward the grand mean of the full horse file
    implied_mean = intercept / (1 - b)

    data = horses_grouped()
    est = estimate_interval_scalar(data)
    centers = np.array([g.mean(axis=2).mean() for g in data.groups])
    slope = np.polyfit(centers, est, 1)[0]
    affine_dev = float(np.max(np.abs(est - (est.mean() + slope * (centers - centers.mean())))))
    mean_dev = abs(est.mean() - centers.mean())
    ok = published_dev <= 2e-3 and abs(implied_mean - HORSES_GRAND_MEAN) <= 5e-2 and affine_dev <= 1e-9 \
        and mean_dev <= 1e-9
    return ok, f'b={b:.6f} a={intercept:.4f}; published rows within {published_dev:.1e}'


def check_binomial_antisymmetry() -> CheckResult:
    n = 10
    dev = max(abs(binomial_log_carrier_deriv(x, n)[0] + binomial_log_carrier_deriv(n - x, n)[0])
              for x in range(1, n))
    return dev <= 1e-12, f'max |l0\'(x) + l0\'(n-x)| = {dev:.1e}'


def check_standardized_rankings() -> CheckResult:
    worst = 0.0
    for t in range(2, 7):
        xs = all_standardized(t)
        worst = max(worst, float(np.max(np.abs(xs.sum(axis=1)))), float(np.max(np.abs(np.linalg.norm(xs, axis=1) - 1))))
    return worst <= 1e-12, f'largest zero-sum / unit-norm deviation {worst:.1e}'


CHECKS: Dict[str, Callable[[], CheckResult]] = {
    'pearson_normal_case': check_pearson_normal,
    'pearson_microarray': check_pearson_microarray,
    'microarray_posterior': check_microarray_posterior,
    'saddle_normal_exact': check_saddle_normal_exact,
    'saddle_exponential_ratio': check_saddle_exponential_ratio,
    'saddle_poisson_ratio': check_saddle_poisson_ratio,
    'tweedie_corrections': check_tweedie_corrections,
    'cgf_identities': check_cgf_identities,
    'horse_affine': check_horse_affine,
    'binomial_antisymmetry': check_binomial_antisymmetry,
    'standardized_rankings': check_standardized_rankings,
}


def run_checks(names: Optional[Iterable[str]] = None, progress: bool = True) -> pd.DataFrame:
    """
    Runs the named checks (all by default).

    Returns:
        pd.DataFrame: Columns check, passed, detail; a check that raises fails
        with the error as its detail.
    """
    names = list(CHECKS) if names is None else list(names)
    rows = []
    for name in tqdm(names, desc='checks', disable=not progress):
        if name not in CHECKS:
            raise NotImplementedError(f'No such check {name}')
        try:
            passed, detail = CHECKS[name]()
        except EbkitError as err:
            passed, detail = False, f'{type(err).__name__}: {err}'
        logger.info('check %s: %s', name, 'pass' if passed else 'FAIL')
        rows.append({'check': name, 'passed': bool(passed), 'detail': detail})
    return pd.DataFrame(rows)
