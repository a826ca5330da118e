from pathlib import Path

import numpy as np
import pytest

from cautious.models.dataset import Dataset, Hyperparameters
from cautious.probes.normalizer import standardize

FIXTURES = Path(__file__).parent


def orthogonal_design(n: int, p: int, seed: int) -> np.ndarray:
    """Centered columns with x'x = nI exactly (up to rounding)."""
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((n, p))
    raw -= raw.mean(axis=0)
    q, _ = np.linalg.qr(raw)
    return np.sqrt(n) * q


@pytest.fixture
def orthogonal_data() -> Dataset:
    n, p = 40, 5
    x = orthogonal_design(n, p, seed=11)
    beta = np.array([2.0, 0.0, -1.5, 0.0, 0.05])
    rng = np.random.default_rng(12)
    y = x @ beta + rng.standard_normal(n)
    return Dataset(y=y - y.mean(), x=x)


@pytest.fixture
def small_data() -> Dataset:
    """Seeded n=20, p=8 problem with three active columns."""
    rng = np.random.default_rng(2024)
    n, p = 20, 8
    x = rng.standard_normal((n, p))
    beta = np.zeros(p)
    beta[[0, 3, 6]] = [2.0, -1.5, 1.0]
    y = x @ beta + rng.standard_normal(n)
    return standardize(Dataset(y=y, x=x))


@pytest.fixture
def tiny_data() -> Dataset:
    rng = np.random.default_rng(5)
    n, p = 15, 4
    x = rng.standard_normal((n, p))
    y = x @ np.array([1.5, 0.0, 0.0, -1.0]) + 0.5 * rng.standard_normal(n)
    return standardize(Dataset(y=y, x=x))


@pytest.fixture
def hp() -> Hyperparameters:
    return Hyperparameters(tau0=1e-3, tau1=2.0, s=1.0, a=1.0, b=1.0)


@pytest.fixture
def sample_csv() -> Path:
    return FIXTURES / "sample.csv"
