from typing import Any, Dict, Optional, Tuple

import numpy as np

from src.errors import UsageError


def _positive(name: str, value: float) -> float:
    if not value > 0:
        raise UsageError(f'parameter {name} must be positive, got {value}')
    return float(value)


class BasicCgf:
    """
    Cumulant generating function K(t) of a one-parameter family.

    Subclasses fill in K and its first three derivatives, the open interval of
    valid t and the range of K' (the values x a saddlepoint can be solved for).
    """
    name = 'basic'
    not_exponential_family = False
    closed_form_inverse = True
    tweedie_available = True
    discrete = False

    def __init__(self, **params: float):
        self.params: Dict[str, float] = dict(params)

    @property
    def domain(self) -> Tuple[float, float]:
        return -np.inf, np.inf

    @property
    def mean_range(self) -> Tuple[float, float]:
        return -np.inf, np.inf

    def K(self, t):
        raise NotImplementedError

    def dK(self, t):
        raise NotImplementedError

    def d2K(self, t):
        raise NotImplementedError

    def d3K(self, t):
        raise NotImplementedError

    def initial_guess(self, x: float) -> float:
        return 0.0

    def exact_density(self, x: float) -> Optional[float]:
        return None

    def in_domain(self, t: float) -> bool:
        lo, hi = self.domain
        return lo < t < hi

    def interior_points(self, n: int = 20) -> np.ndarray:
        lo, hi = self.domain
        a, b = max(lo, -1.0), min(hi, 1.0)
        margin = 0.05 * (b - a)
        return np.linspace(a + margin, b - margin, n)

    def to_dict(self) -> Dict[str, Any]:
        return {'name': self.name, 'params': dict(self.params),
                'not_exponential_family': self.not_exponential_family,
                'closed_form_inverse': self.closed_form_inverse}

    def __repr__(self) -> str:
        args = ', '.join(f'{k}={v!r}' for k, v in self.params.items())
        return f'{type(self).__name__}({args})'
