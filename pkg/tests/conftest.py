from pathlib import Path

import numpy as np
import pytest

from eigenbc import fixtures

DATA = Path(__file__).parent / "data"


@pytest.fixture
def ou():
    return fixtures.ou()


@pytest.fixture
def rd():
    return fixtures.rank_deficient()


def random_hpd(rng, n):
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return G @ G.conj().T + 0.1 * n * np.eye(n)
