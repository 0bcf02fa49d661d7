import numpy as np
import pytest

from core.quadrature import Rules


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def rules() -> Rules:
    return Rules.default()
