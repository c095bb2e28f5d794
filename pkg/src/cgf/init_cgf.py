from typing import Dict, List, Optional

from src.cgf.cgf import BasicCgf
from src.cgf.families import (
    BetaCgf, BinomialCgf, ChiSquareCgf, ExponentialCgf, GammaCgf, GeometricCgf, LaplaceCgf, NormalCgf, PoissonCgf,
)
from src.errors import UsageError

CGF_CLASSES = {
    'normal': NormalCgf,
    'laplace': LaplaceCgf,
    'gamma': GammaCgf,
    'chisquare': ChiSquareCgf,
    'exponential': ExponentialCgf,
    'poisson': PoissonCgf,
    'binomial': BinomialCgf,
    'geometric': GeometricCgf,
    'beta': BetaCgf,
}

DEFAULT_PARAMS = {
    'normal': {'sigma2': 1.0, 'mu': 0.0},
    'laplace': {'mu': 0.0, 'b': 1.0},
    'gamma': {'alpha': 3.0, 'beta': 2.0},
    'chisquare': {'k': 4.0},
    'exponential': {'rate': 1.0},
    'poisson': {'rate': 2.0},
    'binomial': {'n': 20, 'p': 0.5},
    'geometric': {'p': 0.5},
    'beta': {'alpha': 2.0, 'beta': 3.0},
}


def init_cgf(cgf_name: str, cgf_params: Optional[Dict[str, float]] = None) -> BasicCgf:
    if cgf_name not in CGF_CLASSES:
        raise NotImplementedError(f'No such cgf name {cgf_name}')
    params = dict(DEFAULT_PARAMS[cgf_name])
    unknown = set(cgf_params or {}) - set(params)
    if unknown:
        raise UsageError(f'unknown parameter(s) {sorted(unknown)} for {cgf_name}; expected {sorted(params)}')
    params.update(cgf_params or {})
    return CGF_CLASSES[cgf_name](**params)


def builtin_models() -> List[BasicCgf]:
    return [init_cgf(name) for name in CGF_CLASSES]
