"""Reference weights with hand-computable answers."""
from __future__ import annotations

import numpy as np

from .weights import GaussianWeight, make_gaussian_weight


def ou() -> GaussianWeight:
    """Discretised Ornstein-Uhlenbeck edge: A = [[5/4, -1], [-1, 5/4]].

    Zeros 1/2 and 2, eigen-boundary 3/4, Lambda = pi.
    """
    return make_gaussian_weight(1.0, [[1.25, -1.0], [-1.0, 1.25]])


def rank_deficient() -> GaussianWeight:
    """d = 2 edge with A_LR = diag(4/5, 0): the second coordinate is uncoupled."""
    C = np.diag([0.8, 0.0])
    I = np.eye(2)
    return make_gaussian_weight(1.0, np.block([[I, C], [C.T, I]]))


def decoupled_ou() -> GaussianWeight:
    """Two independent OU copies; every zero is double."""
    I = np.eye(2)
    return make_gaussian_weight(1.0, np.block([[1.25 * I, -I], [-I, 1.25 * I]]))
