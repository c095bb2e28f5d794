import numpy as np
import pandas as pd
import pytest

from src.moments import MomentSummary
from src.pearson import fit_pearson


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def standard_normal_fit():
    return fit_pearson(MomentSummary.from_standardized(1.0, 0.0, 3.0))


@pytest.fixture
def conjugate_fit():
    """Marginal N(0, 2) of z = mu + noise with mu ~ N(0, 1)."""
    return fit_pearson(MomentSummary.from_standardized(2.0, 0.0, 3.0))


@pytest.fixture
def microarray_fit():
    return fit_pearson(MomentSummary.from_standardized(1.2885, 0.04181, 3.6445))


@pytest.fixture
def conjugate_z():
    rng = np.random.default_rng(0)
    mu = rng.normal(0.0, 1.0, 2000)
    return mu + rng.normal(0.0, 1.0, 2000)


@pytest.fixture
def write_csv(tmp_path):
    def _write(name, frame):
        path = tmp_path / name
        pd.DataFrame(frame).to_csv(path, index=False)
        return str(path)
    return _write
