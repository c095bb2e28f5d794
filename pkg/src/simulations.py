"""Simulation experiments with known ground truth.

Each experiment draws a population of true parameters, observes them with
noise and compares the empirical Bayes estimate against the raw estimate.
"""
from typing import Any, Callable, Dict

import numpy as np

from src.datasets import synthetic_blood_pressure
from src.linear_eb import GroupedSample, estimate, estimate_interval_vector
from src.pearson import fit_pearson_sample
from src.tweedie import binomial_posterior, normal_posterior_mean, normal_variance_posterior


def conjugate_normal(seed: int, n: int = 5000) -> Dict[str, Any]:
    """
    mu ~ N(0, 1), z | mu ~ N(mu, 1); the Bayes rule is z / 2.
    """
    rng = np.random.default_rng(seed)
    mu = rng.normal(0.0, 1.0, n)
    z = mu + rng.normal(0.0, 1.0, n)
    est = normal_posterior_mean(z, 1.0, fit_pearson_sample(z))
    return {'experiment': 'conjugate_normal', 'seed': seed,
            'mse_eb': float(np.mean((est - mu) ** 2)), 'mse_raw': float(np.mean((z - mu) ** 2)),
            'rmse_vs_bayes': float(np.sqrt(np.mean((est - z / 2) ** 2)))}


def linear_eb_groups(seed: int, n_groups: int = 50, n_per_group: int = 5) -> Dict[str, Any]:
    """mu_i ~ N(0, 1) with n_per_group observations N(mu_i, 1) per group."""
    rng = np.random.default_rng(seed)
    mu = rng.normal(0.0, 1.0, n_groups)
    data = GroupedSample([m + rng.normal(0.0, 1.0, n_per_group) for m in mu])
    est = estimate(data)[:, 0]
    means = np.array([g.mean() for g in data.groups])
    return {'experiment': 'linear_eb_groups', 'seed': seed,
            'mse_eb': float(np.mean((est - mu) ** 2)), 'mse_raw': float(np.mean((means - mu) ** 2)),
            'grand_mean_gap': float(abs(est.mean() - means.mean()))}


def variance_estimates(seed: int, n: int = 2000, nu: int = 10) -> Dict[str, Any]:
    """sigma2_i ~ InvGamma(6, 5) observed as u_i = sigma2_i chi2_nu / nu."""
    rng = np.random.default_rng(seed)
    sigma2 = 1.0 / rng.gamma(6.0, 0.2, n)
    u = sigma2 * rng.chisquare(nu, n) / nu
    est = normal_variance_posterior(u, nu, fit_pearson_sample(u))
    return {'experiment': 'variance_estimates', 'seed': seed,
            'mse_eb': float(np.mean((est - sigma2) ** 2)), 'mse_raw': float(np.mean((u - sigma2) ** 2))}


def binomial_proportions(seed: int, n: int = 2000, trials: int = 30) -> Dict[str, Any]:
    """p_i ~ Beta(6, 4); counts on the boundary carry no Stirling carrier and are dropped."""
    rng = np.random.default_rng(seed)
    p = rng.beta(6.0, 4.0, n)
    x = rng.binomial(trials, p)
    inside = (x > 0) & (x < trials)
    p, x = p[inside], x[inside].astype(float)
    fit = fit_pearson_sample(x)
    est = np.array([binomial_posterior(xi, trials, fit)[1] for xi in x])
    return {'experiment': 'binomial_proportions', 'seed': seed,
            'mse_eb': float(np.mean((est - p) ** 2)), 'mse_raw': float(np.mean((x / trials - p) ** 2))}


def interval_blood_pressure(seed: int, n_patients: int = 20, n_readings: int = 3) -> Dict[str, Any]:
    data, truth = synthetic_blood_pressure(n_patients, n_readings, seed=seed)
    est = estimate_interval_vector(data)
    centers = np.stack([g.mean(axis=2).mean(axis=0) for g in data.groups])
    return {'experiment': 'interval_blood_pressure', 'seed': seed,
            'mse_eb': float(np.mean((est - truth) ** 2)), 'mse_raw': float(np.mean((centers - truth) ** 2))}


EXPERIMENTS: Dict[str, Callable[[int], Dict[str, Any]]] = {
    'conjugate_normal': conjugate_normal,
    'linear_eb_groups': linear_eb_groups,
    'variance_estimates': variance_estimates,
    'binomial_proportions': binomial_proportions,
    'interval_blood_pressure': interval_blood_pressure,
}


def run_experiment(name: str, seed: int) -> Dict[str, Any]:
    if name not in EXPERIMENTS:
        raise NotImplementedError(f'No such experiment {name}')
    return EXPERIMENTS[name](seed)
