"""Tweedie posteriors for ranking data.

A ranking R of t objects is mapped to the zero-sum unit vector
x = (R - (t+1)/2) / sqrt(t (t^2 - 1) / 12). Posterior means use per-coordinate
Pearson scores under one of three carrying densities: uniform over
permutations, von Mises-Fisher, or multivariate normal.
"""
import logging
import warnings
from dataclasses import dataclass
from itertools import permutations
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy.special import gammaln

from src.errors import BadOrder, DimensionMismatch, NotAPermutation, UsageError, ZeroResultant
from src.moments import classical_moments
from src.pearson import PearsonFit, fit_pearson, score

logger = logging.getLogger(__name__)

BESSEL_SWITCH = 30.0
SERIES_TAIL = 1e-12
MAX_SERIES_TERMS = 10000
R_CLIP = 1 - 1e-9
CARRIERS = ('uniform', 'vmf', 'normal')


def validate_ranking(r: Sequence[int]) -> np.ndarray:
    arr = np.asarray(r)
    t = arr.size
    if arr.ndim != 1 or t < 2:
        raise NotAPermutation(f'a ranking needs at least 2 entries, got shape {arr.shape}')
    if not np.array_equal(np.sort(arr), np.arange(1, t + 1)):
        raise NotAPermutation(f'{arr.tolist()} is not a permutation of 1..{t}')
    return arr.astype(int)


def standardize_ranking(r: Sequence[int]) -> np.ndarray:
    R = validate_ranking(r)
    t = R.size
    return (R - (t + 1) / 2) / np.sqrt(t * (t ** 2 - 1) / 12)


def standardize_rankings(rankings: np.ndarray) -> np.ndarray:
    """Standardizes every row of an N x t matrix of rankings."""
    return np.vstack([standardize_ranking(row) for row in np.atleast_2d(rankings)])


@dataclass(frozen=True, eq=False)
class VmfParams:
    """
    Attributes:
        m (np.ndarray): Unit consensus direction (all zeros when undefined).
        kappa (float): Concentration.
        r (float): Mean resultant length.
        null_direction (bool): True when the resultant vanished and m is undefined.
    """
    m: np.ndarray
    kappa: float
    r: float
    null_direction: bool = False


def vmf_mle(xs: np.ndarray) -> VmfParams:
    """
    Maximum likelihood direction and approximate concentration.

    Returns m = sum(x) / |sum(x)|, r = |sum(x)| / N and
    kappa = r (t - 1 - r^2) / (1 - r^2), with r clipped below 1.

    Raises:
        ZeroResultant: The resultant vanishes; the error carries the
            kappa = 0 parameters with a null direction.
    """
    X = np.atleast_2d(np.asarray(xs, dtype=float))
    N, t = X.shape
    if N < 1 or t < 2:
        raise UsageError(f'need at least one ranking of 2 or more objects, got shape {X.shape}')
    total = X.sum(axis=0)
    norm = float(np.linalg.norm(total))
    if norm <= 1e-12 * N:
        raise ZeroResultant('the standardized rankings sum to zero; the consensus direction is undefined',
                            params=VmfParams(m=np.zeros(t), kappa=0.0, r=0.0, null_direction=True))
    r = min(norm / N, R_CLIP)
    kappa = r * (t - 1 - r ** 2) / (1 - r ** 2)
    logger.info('vMF fit over %d rankings: r=%.6g kappa=%.6g', N, r, kappa)
    return VmfParams(m=total / norm, kappa=float(kappa), r=float(r))


def log_bessel_iv(nu: float, z: float) -> float:
    """
    log I_nu(z) for z > 0.

    Ascending power series up to BESSEL_SWITCH, stopped once the geometric
    bound on the remaining tail falls below SERIES_TAIL relative; the
    large-argument asymptotic expansion beyond.
    """
    if not z > 0:
        raise UsageError(f'Bessel argument must be positive, got {z}')
    if z <= BESSEL_SWITCH:
        log_first = nu * np.log(z / 2) - gammaln(nu + 1)
        quarter = (z / 2) ** 2
        term, total = 1.0, 1.0
        for k in range(MAX_SERIES_TERMS):
            ratio = quarter / ((k + 1) * (k + nu + 1))
            term *= ratio
            total += term
            if ratio < 1 and term * ratio / (1 - ratio) < SERIES_TAIL * total:
                break
        return float(log_first + np.log(total))

    mu = 4 * nu ** 2
    coef, total, prev = 1.0, 1.0, np.inf
    for k in range(1, MAX_SERIES_TERMS):
        coef *= -(mu - (2 * k - 1) ** 2) / (8 * k * z)
        if coef == 0 or abs(coef) >= prev:
            break
        total += coef
        prev = abs(coef)
        if prev < 1e-17 * abs(total):
            break
    return float(z - 0.5 * np.log(2 * np.pi * z) + np.log(total))


def bessel_iv(nu: float, z: float) -> float:
    return float(np.exp(log_bessel_iv(nu, z)))


def vmf_norm_constant(t: int, kappa: float) -> float:
    """
    Sphere approximation of the normalizing constant over t! rankings:
    kappa^nu / (2^nu t! I_nu(kappa) Gamma((t - 1)/2)) with nu = (t - 3)/2.
    """
    if t < 3:
        raise BadOrder(f'the sphere approximation needs t >= 3, got {t}')
    if not kappa > 0:
        raise UsageError(f'kappa must be positive, got {kappa}')
    nu = (t - 3) / 2
    log_c = (nu * np.log(kappa / 2) - gammaln(t + 1) - log_bessel_iv(nu, kappa) - gammaln((t - 1) / 2))
    return float(np.exp(log_c))


def all_standardized(t: int) -> np.ndarray:
    """Standardizations of all t! rankings, in lexicographic order of the rankings."""
    return standardize_rankings(np.array(list(permutations(range(1, t + 1)))))


def sample_discrete_vmf(m: np.ndarray, kappa: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draws rankings with probability proportional to exp(kappa m'x) by enumerating all permutations."""
    m = np.asarray(m, dtype=float)
    t = m.size
    if t > 8:
        raise UsageError(f'enumeration sampling is limited to t <= 8, got {t}')
    perms = np.array(list(permutations(range(1, t + 1))))
    logits = kappa * standardize_rankings(perms) @ m
    weights = np.exp(logits - logits.max())
    return perms[rng.choice(len(perms), size=size, p=weights / weights.sum())]


def _resolve_sigma(Sigma: Union[None, str, np.ndarray], X: np.ndarray) -> np.ndarray:
    t = X.shape[1]
    if Sigma is None or (isinstance(Sigma, str) and Sigma == 'sample'):
        return np.atleast_2d(np.cov(X, rowvar=False))
    if isinstance(Sigma, str):
        if Sigma != 'identity':
            raise NotImplementedError(f'No such covariance choice {Sigma}')
        return np.eye(t)
    S = np.asarray(Sigma, dtype=float)
    if S.shape != (t, t):
        raise DimensionMismatch(f'Sigma has shape {S.shape}, expected {(t, t)}')
    return S


def column_fits(xs: np.ndarray) -> List[PearsonFit]:
    X = np.atleast_2d(np.asarray(xs, dtype=float))
    return [fit_pearson(classical_moments(X[:, j])) for j in range(X.shape[1])]


def rank_posterior(xs: np.ndarray, carrier: str = 'uniform', fits: Optional[Sequence[PearsonFit]] = None,
                   Sigma: Union[None, str, np.ndarray] = None, vmf: Optional[VmfParams] = None) -> np.ndarray:
    """
    Posterior mean vector for every standardized ranking.

    Args:
        xs: N x t standardized rankings.
        carrier (str): 'uniform' (score), 'vmf' (score - kappa m) or 'normal' (x + Sigma score).
        fits: One PearsonFit per coordinate; fitted from the columns when omitted.
        Sigma: Normal-carrier covariance: an array, 'identity' or None for the sample covariance.
        vmf (VmfParams): vMF parameters; estimated from xs when omitted.

    Returns:
        np.ndarray: N x t posterior means.
    """
    if carrier not in CARRIERS:
        raise NotImplementedError(f'No such carrier {carrier}')
    X = np.atleast_2d(np.asarray(xs, dtype=float))
    t = X.shape[1]
    fits = column_fits(X) if fits is None else list(fits)
    if len(fits) != t:
        raise DimensionMismatch(f'{len(fits)} Pearson fits for {t} coordinates')
    S = np.column_stack([score(fits[j], X[:, j]) for j in range(t)])

    if carrier == 'uniform':
        return S
    if carrier == 'vmf':
        if vmf is None:
            try:
                vmf = vmf_mle(X)
            except ZeroResultant as err:
                warnings.warn(str(err))
                vmf = err.params
        if vmf.m.size != t:
            raise DimensionMismatch(f'vMF direction has {vmf.m.size} entries, expected {t}')
        if vmf.kappa == 0:
            return S
        return S - vmf.kappa * vmf.m
    return X + S @ _resolve_sigma(Sigma, X).T


def consensus_ranking(values: Sequence[float]) -> np.ndarray:
    """Ranks values in descending order (largest gets 1); ties go to the lower index."""
    v = np.asarray(values, dtype=float)
    order = np.argsort(-v, kind='stable')
    ranks = np.empty(v.size, dtype=int)
    ranks[order] = np.arange(1, v.size + 1)
    return ranks


def consensus(posteriors: np.ndarray, groups: Optional[Sequence] = None,
              objects: Optional[Sequence[str]] = None) -> pd.DataFrame:
    """
    Consensus ranking per group from averaged posterior vectors.

    Returns:
        pd.DataFrame: One row per group (in order of first appearance), one rank column per object.
    """
    P = np.atleast_2d(np.asarray(posteriors, dtype=float))
    groups = np.zeros(P.shape[0], dtype=int) if groups is None else np.asarray(groups)
    if groups.shape[0] != P.shape[0]:
        raise DimensionMismatch(f'{groups.shape[0]} group labels for {P.shape[0]} posteriors')
    objects = list(range(P.shape[1])) if objects is None else list(objects)
    labels = list(pd.unique(pd.Series(groups)))
    rows = [consensus_ranking(P[groups == label].mean(axis=0)) for label in labels]
    return pd.DataFrame(rows, index=pd.Index(labels, name='group'), columns=objects)
