import numpy as np
from scipy import stats
from scipy.special import hyp1f1, poch

from src.cgf.cgf import BasicCgf, _positive
from src.errors import UsageError


class NormalCgf(BasicCgf):
    name = 'normal'

    def __init__(self, sigma2: float = 1.0, mu: float = 0.0):
        super().__init__(sigma2=_positive('sigma2', sigma2), mu=float(mu))
        self.sigma2 = self.params['sigma2']
        self.mu = self.params['mu']

    def K(self, t):
        return self.mu * t + self.sigma2 * t ** 2 / 2

    def dK(self, t):
        return self.mu + self.sigma2 * t

    def d2K(self, t):
        return self.sigma2 + 0.0 * t

    def d3K(self, t):
        return 0.0 * t

    def initial_guess(self, x):
        return (x - self.mu) / self.sigma2

    def exact_density(self, x):
        return float(stats.norm.pdf(x, loc=self.mu, scale=np.sqrt(self.sigma2)))


class LaplaceCgf(BasicCgf):
    """Laplace(mu, b); K(t) = mu t - log(1 - b^2 t^2) for |t| < 1/b."""
    name = 'laplace'
    not_exponential_family = True

    def __init__(self, mu: float = 0.0, b: float = 1.0):
        super().__init__(mu=float(mu), b=_positive('b', b))
        self.mu = self.params['mu']
        self.b = self.params['b']

    @property
    def domain(self):
        return -1 / self.b, 1 / self.b

    def _d(self, t):
        return 1 - self.b ** 2 * t ** 2

    def K(self, t):
        return self.mu * t - np.log(self._d(t))

    def dK(self, t):
        return self.mu + 2 * self.b ** 2 * t / self._d(t)

    def d2K(self, t):
        return 2 * self.b ** 2 * (1 + self.b ** 2 * t ** 2) / self._d(t) ** 2

    def d3K(self, t):
        return 4 * self.b ** 4 * t * (3 + self.b ** 2 * t ** 2) / self._d(t) ** 3

    def exact_density(self, x):
        return float(stats.laplace.pdf(x, loc=self.mu, scale=self.b))


class GammaCgf(BasicCgf):
    """Gamma with shape alpha and rate beta."""
    name = 'gamma'

    def __init__(self, alpha: float = 3.0, beta: float = 2.0):
        super().__init__(alpha=_positive('alpha', alpha), beta=_positive('beta', beta))
        self.alpha = self.params['alpha']
        self.beta = self.params['beta']

    @property
    def domain(self):
        return -np.inf, self.beta

    @property
    def mean_range(self):
        return 0.0, np.inf

    def K(self, t):
        return -self.alpha * np.log(1 - t / self.beta)

    def dK(self, t):
        return self.alpha / (self.beta - t)

    def d2K(self, t):
        return self.alpha / (self.beta - t) ** 2

    def d3K(self, t):
        return 2 * self.alpha / (self.beta - t) ** 3

    def initial_guess(self, x):
        return self.beta - self.alpha / x

    def exact_density(self, x):
        return float(stats.gamma.pdf(x, a=self.alpha, scale=1 / self.beta))


class ChiSquareCgf(BasicCgf):
    name = 'chisquare'

    def __init__(self, k: float = 4.0):
        super().__init__(k=_positive('k', k))
        self.k = self.params['k']

    @property
    def domain(self):
        return -np.inf, 0.5

    @property
    def mean_range(self):
        return 0.0, np.inf

    def K(self, t):
        return -self.k / 2 * np.log(1 - 2 * t)

    def dK(self, t):
        return self.k / (1 - 2 * t)

    def d2K(self, t):
        return 2 * self.k / (1 - 2 * t) ** 2

    def d3K(self, t):
        return 8 * self.k / (1 - 2 * t) ** 3

    def initial_guess(self, x):
        return 0.5 - self.k / (2 * x)

    def exact_density(self, x):
        return float(stats.chi2.pdf(x, df=self.k))


class ExponentialCgf(BasicCgf):
    name = 'exponential'

    def __init__(self, rate: float = 1.0):
        super().__init__(rate=_positive('rate', rate))
        self.rate = self.params['rate']

    @property
    def domain(self):
        return -np.inf, self.rate

    @property
    def mean_range(self):
        return 0.0, np.inf

    def K(self, t):
        return np.log(self.rate / (self.rate - t))

    def dK(self, t):
        return 1 / (self.rate - t)

    def d2K(self, t):
        return 1 / (self.rate - t) ** 2

    def d3K(self, t):
        return 2 / (self.rate - t) ** 3

    def initial_guess(self, x):
        return self.rate - 1 / x

    def exact_density(self, x):
        return float(stats.expon.pdf(x, scale=1 / self.rate))


class PoissonCgf(BasicCgf):
    name = 'poisson'
    discrete = True

    def __init__(self, rate: float = 2.0):
        super().__init__(rate=_positive('rate', rate))
        self.rate = self.params['rate']

    @property
    def mean_range(self):
        return 0.0, np.inf

    def K(self, t):
        return self.rate * np.expm1(t)

    def dK(self, t):
        return self.rate * np.exp(t)

    d2K = dK
    d3K = dK

    def initial_guess(self, x):
        return np.log(x / self.rate)

    def exact_density(self, x):
        return float(stats.poisson.pmf(x, self.rate))


class BinomialCgf(BasicCgf):
    name = 'binomial'
    discrete = True
    tweedie_available = False

    def __init__(self, n: int = 20, p: float = 0.5):
        if not 0 < p < 1:
            raise UsageError(f'parameter p must lie in (0, 1), got {p}')
        super().__init__(n=int(_positive('n', n)), p=float(p))
        self.n = self.params['n']
        self.p = self.params['p']

    @property
    def mean_range(self):
        return 0.0, float(self.n)

    def _s(self, t):
        # success probability tilted by t
        return self.p * np.exp(t) / (1 - self.p + self.p * np.exp(t))

    def K(self, t):
        return self.n * np.log1p(self.p * np.expm1(t))

    def dK(self, t):
        return self.n * self._s(t)

    def d2K(self, t):
        s = self._s(t)
        return self.n * s * (1 - s)

    def d3K(self, t):
        s = self._s(t)
        return self.n * s * (1 - s) * (1 - 2 * s)

    def initial_guess(self, x):
        return np.log(x * (1 - self.p) / (self.p * (self.n - x)))

    def exact_density(self, x):
        return float(stats.binom.pmf(x, self.n, self.p))


class GeometricCgf(BasicCgf):
    """Number of trials up to the first success, support 1, 2, ..."""
    name = 'geometric'
    discrete = True

    def __init__(self, p: float = 0.5):
        if not 0 < p < 1:
            raise UsageError(f'parameter p must lie in (0, 1), got {p}')
        super().__init__(p=float(p))
        self.p = self.params['p']
        self.q = 1 - self.p

    @property
    def domain(self):
        return -np.inf, -np.log(self.q)

    @property
    def mean_range(self):
        return 1.0, np.inf

    def _w(self, t):
        return self.q * np.exp(t)

    def K(self, t):
        return np.log(self.p) + t - np.log1p(-self._w(t))

    def dK(self, t):
        return 1 / (1 - self._w(t))

    def d2K(self, t):
        w = self._w(t)
        return w / (1 - w) ** 2

    def d3K(self, t):
        w = self._w(t)
        return w * (1 + w) / (1 - w) ** 3

    def initial_guess(self, x):
        return np.log((1 - 1 / x) / self.q)

    def exact_density(self, x):
        return float(stats.geom.pmf(x, self.p))


class BetaCgf(BasicCgf):
    """
    Beta(alpha, beta) with K(t) = log 1F1(alpha; alpha + beta; t).

    K' has no closed-form inverse, so saddlepoints come from the numerical
    solver only.
    """
    name = 'beta'
    closed_form_inverse = False
    tweedie_available = False

    def __init__(self, alpha: float = 2.0, beta: float = 3.0):
        super().__init__(alpha=_positive('alpha', alpha), beta=_positive('beta', beta))
        self.alpha = self.params['alpha']
        self.beta = self.params['beta']

    @property
    def mean_range(self):
        return 0.0, 1.0

    def _mgf_derivative(self, t, k: int):
        a, c = self.alpha, self.alpha + self.beta
        return poch(a, k) / poch(c, k) * hyp1f1(a + k, c + k, t)

    def _ratios(self, t):
        m0 = self._mgf_derivative(t, 0)
        return [self._mgf_derivative(t, k) / m0 for k in (1, 2, 3)]

    def K(self, t):
        return np.log(self._mgf_derivative(t, 0))

    def dK(self, t):
        return self._ratios(t)[0]

    def d2K(self, t):
        r1, r2, _ = self._ratios(t)
        return r2 - r1 ** 2

    def d3K(self, t):
        r1, r2, r3 = self._ratios(t)
        return r3 - 3 * r2 * r1 + 2 * r1 ** 3

    def exact_density(self, x):
        return float(stats.beta.pdf(x, self.alpha, self.beta))
